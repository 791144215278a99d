"""Spectral sequence pages of a filtered cochain complex.

Every page cell is stored as a subquotient of the original space K^{p+q},
never as a quotient of quotients. Two independent routes compute the pages:

* first_page + turn_page: the first page comes from the filtration, and each
  later page is built from the previous one using only its cells, its
  differentials, and the underlying d (representative lifts are solved in
  the canonical complement bases).
* page_direct: the classical cycle/boundary formula evaluated from scratch
  on the filtration for any r.

The two must agree cellwise in dimension; the fuzz suites and the oracle
command enforce exactly that.
"""

from __future__ import annotations

from .errors import EngineError, InvariantError
from .filtered import CochainComplex, FilteredComplex, Filtration
from .linalg import Matrix, Subquotient, Subspace, image, induced_map


class Page:
    """One page: cells E_r^{p,q} <= K^{p+q} and differentials of bidegree (r, 1-r)."""

    def __init__(
        self,
        r: int,
        cx: CochainComplex,
        support: tuple[tuple[int, int], ...],
        cells: dict[tuple[int, int], Subquotient],
        diffs: dict[tuple[int, int], Matrix],
    ):
        if r < 1:
            raise InvariantError("pages are indexed from r = 1")
        self.r = r
        self.cx = cx
        self.support = support
        self.cells = cells
        self.diffs = diffs
        for (p, q) in support:
            out = self.diff(p, q)
            tgt = (p + r, q - r + 1)
            nxt = self.diff(*tgt)
            if nxt.cols != out.rows:
                raise InvariantError(f"differential shapes disagree at cell {(p, q)}")
            if not (nxt @ out).is_zero():
                raise InvariantError(f"d_r o d_r != 0 at cell {(p, q)}", witness=(p, q))

    def cell(self, p: int, q: int) -> Subquotient:
        hit = self.cells.get((p, q))
        if hit is not None:
            return hit
        return Subquotient.zero(self.cx.dim(p + q))

    def diff(self, p: int, q: int) -> Matrix:
        hit = self.diffs.get((p, q))
        if hit is not None:
            return hit
        tgt = self.cell(p + self.r, q - self.r + 1)
        return Matrix.zeros(tgt.dim, self.cell(p, q).dim)

    def dims(self) -> dict[tuple[int, int], int]:
        """Dimensions of the nonzero cells."""
        return {pq: c.dim for pq, c in self.cells.items() if c.dim > 0}

    def all_differentials_zero(self) -> bool:
        return all(m.is_zero() for m in self.diffs.values())


def _support(fk: FilteredComplex) -> tuple[tuple[int, int], ...]:
    return tuple(
        (p, n - p) for p in fk.levels() for n in fk.cx.degrees()
    )


def first_page(fk: FilteredComplex) -> Page:
    """E_1^{p,q} = (F^p cap d^{-1}F^{p+1}) / (F^{p+1} + d F^p), with d_1 induced by d.

    The cell is the classical presentation of H^{p+q}(Gr^p) inside K^{p+q}.
    """
    cells: dict[tuple[int, int], Subquotient] = {}
    support = _support(fk)
    for (p, q) in support:
        n = p + q
        z = fk.F(p, n).intersect(fk.d_preimage(p + 1, n))
        brows = list(fk.F(p + 1, n).basis_rows)
        dprev = fk.cx.diff(n - 1)
        for v in fk.F(p, n - 1).basis_rows:
            brows.append(dprev.apply(v))
        b = Subspace.span(fk.cx.dim(n), brows)
        cells[(p, q)] = Subquotient.of(z, b)
    diffs: dict[tuple[int, int], Matrix] = {}
    for (p, q) in support:
        n = p + q
        src = cells[(p, q)]
        tgt = cells.get((p + 1, q), Subquotient.zero(fk.cx.dim(n + 1)))
        diffs[(p, q)] = induced_map(fk.cx.diff(n), src, tgt)
    return Page(1, fk.cx, support, cells, diffs)


def turn_page(page: Page) -> Page:
    """Compute page r+1 from page r without consulting the filtration.

    New cells are ker d_r / im d_r, re-expressed as subquotients of the
    original spaces through the canonical complement bases. The next
    differential is induced by d on representative lifts: for a class [w]
    the representative w - b, b in the new denominator, is chosen so that
    d(w - b) lands in the new numerator of the target cell.
    """
    r2 = page.r + 1
    cx = page.cx
    cells: dict[tuple[int, int], Subquotient] = {}
    for (p, q) in page.support:
        cell = page.cell(p, q)
        amb = cell.ambient_dim
        dout = page.diff(p, q)
        din = page.diff(p - page.r, q + page.r - 1)
        zrows = list(cell.B.basis_rows)
        for kv in dout.nullspace():
            zrows.append(cell.lift(kv))
        znew = Subspace.span(amb, zrows)
        brows = list(cell.B.basis_rows)
        for j in range(din.cols):
            col = din.col(j)
            brows.append(cell.lift(col))
        bnew = Subspace.span(amb, brows)
        cells[(p, q)] = Subquotient.of(znew, bnew)
    diffs: dict[tuple[int, int], Matrix] = {}
    for (p, q) in page.support:
        n = p + q
        src = cells[(p, q)]
        tgt = cells.get((p + r2, q - r2 + 1), Subquotient.zero(cx.dim(n + 1)))
        if src.dim == 0:
            diffs[(p, q)] = Matrix.zeros(tgt.dim, 0)
            continue
        d = cx.diff(n)
        bimages = [d.apply(b) for b in src.B.basis_rows]
        system = Matrix.from_cols(bimages + list(tgt.Z.basis_rows), rows=cx.dim(n + 1))
        targets = [d.apply(w) for w in src.complement]
        sols = system.solve_many(targets)
        cols = []
        for dw, x in zip(targets, sols):
            if x is None:
                raise EngineError(
                    f"representative lift failed at cell {(p, q)} on page {page.r}"
                )
            v = list(dw)
            for i, c in enumerate(x[: len(bimages)]):
                if c != 0:
                    for k, a in enumerate(bimages[i]):
                        v[k] -= c * a
            cols.append(tgt.coset_coords(tuple(v)))
        diffs[(p, q)] = Matrix.from_cols(cols, rows=tgt.dim)
    return Page(r2, cx, page.support, cells, diffs)


def page_direct(fk: FilteredComplex, r: int, p: int, q: int) -> Subquotient:
    """Classical cycle/boundary formula for E_r^{p,q}, straight from the filtration.

    Z_r = F^p K^{p+q} cap d^{-1}(F^{p+r} K^{p+q+1})
    B_r = (F^{p+1} cap Z_r) + d(F^{p-r+1} K^{p+q-1} cap d^{-1} F^p)
    """
    if r < 1:
        raise InvariantError("pages are indexed from r = 1")
    n = p + q
    if n < fk.cx.lo or n > fk.cx.hi:
        return Subquotient.zero(0)
    zr = fk.F(p, n).intersect(fk.d_preimage(p + r, n))
    aa = fk.F(p + 1, n).intersect(zr)
    src = fk.F(p - r + 1, n - 1).intersect(fk.d_preimage(p, n - 1))
    br = aa.sum_with(image(fk.cx.diff(n - 1), src))
    return Subquotient.of(zr, br)


class SpectralSequence:
    """Lazily extended chain of pages of a filtered complex."""

    def __init__(self, fk: FilteredComplex):
        self.fk = fk
        self._pages: list[Page] = []

    def page(self, r: int) -> Page:
        if r < 1:
            raise InvariantError("pages are indexed from r = 1")
        if not self._pages:
            self._pages.append(first_page(self.fk))
        while len(self._pages) < r:
            self._pages.append(turn_page(self._pages[-1]))
        return self._pages[r - 1]

    def stabilization_page(self) -> int:
        """Smallest r* with d_s = 0 for all s >= r*, by filtration width."""
        return max(1, self.fk.width() + 1)

    def e_infinity(self) -> Page:
        return self.page(self.stabilization_page())

    def is_degenerate_at(self, r: int) -> bool:
        """True iff all differentials d_s with s >= r vanish."""
        r_star = self.stabilization_page()
        return all(self.page(s).all_differentials_zero() for s in range(r, r_star))


def e_infinity_compare(fk: FilteredComplex) -> dict:
    """Compare total E_infinity dimensions against the cohomology of K.

    Raises EngineError on any mismatch (an engine bug, never bad input).
    """
    ss = SpectralSequence(fk)
    einf = ss.e_infinity()
    totals: dict[int, dict[str, int]] = {}
    for n in fk.cx.degrees():
        total = sum(
            einf.cell(p, n - p).dim for p in fk.levels()
        )
        h = fk.cx.betti(n)
        totals[n] = {"e_infinity": total, "cohomology": h}
        if total != h:
            raise EngineError(
                f"E_infinity total {total} != dim H^{n} = {h} in degree {n}"
            )
    return {"r_star": ss.stabilization_page(), "totals": totals, "ok": True}


def decalage(fk: FilteredComplex) -> FilteredComplex:
    """Shifted filtration (Dec F)^p K^n = F^{p+n} K^n cap d^{-1}(F^{p+n+1} K^{n+1}).

    Its page r agrees in dimension with page r+1 of the original after the
    renumbering (p, q) -> (2p + q, -p).
    """
    cx = fk.cx
    p_lo = fk.p_lo - cx.hi - 1
    p_top = fk.p_top - cx.lo
    table: dict[tuple[int, int], Subspace] = {}
    for n in cx.degrees():
        for p in range(p_lo, p_top + 1):
            table[(p, n)] = fk.F(p + n, n).intersect(fk.d_preimage(p + n + 1, n))
    return FilteredComplex(cx, Filtration(p_lo, p_top, table))


def decalage_renumbering_report(fk: FilteredComplex, max_page: int = 3) -> dict:
    """Check dim E_r^{p,q}(Dec F K) = dim E_{r+1}^{2p+q,-p}(F K) for r <= max_page."""
    dec = decalage(fk)
    ss_dec = SpectralSequence(dec)
    ss_orig = SpectralSequence(fk)
    mismatches = []
    table: dict[int, dict[str, list[int]]] = {}
    for r in range(1, max_page + 1):
        pg_dec = ss_dec.page(r)
        pg_orig = ss_orig.page(r + 1)
        seen: dict[str, list[int]] = {}
        pairs = {(p, q): (2 * p + q, -p) for (p, q) in pg_dec.support}
        for (p, q), (pp, qq) in pairs.items():
            a = pg_dec.cell(p, q).dim
            b = pg_orig.cell(pp, qq).dim
            if a != 0 or b != 0:
                seen[f"{p},{q}"] = [a, b]
            if a != b:
                mismatches.append({"r": r, "cell": [p, q], "dims": [a, b]})
        # cells of the original page must all be hit by the renumbering
        for (pp, qq) in pg_orig.support:
            p, q = -qq, pp + 2 * qq
            if (p, q) not in pairs:
                b = pg_orig.cell(pp, qq).dim
                if b != 0:
                    mismatches.append({"r": r, "cell": [p, q], "dims": [0, b]})
        table[r] = seen
    return {"max_page": max_page, "table": table, "mismatches": mismatches, "ok": not mismatches}


def oracle_report(fk: FilteredComplex, max_page: int = 6) -> dict:
    """Cellwise dimension comparison of the turned pages against page_direct."""
    ss = SpectralSequence(fk)
    mismatches = []
    for r in range(1, max_page + 1):
        pg = ss.page(r)
        for (p, q) in pg.support:
            a = pg.cell(p, q).dim
            b = page_direct(fk, r, p, q).dim
            if a != b:
                mismatches.append({"r": r, "cell": [p, q], "dims": [a, b]})
    return {"max_page": max_page, "mismatches": mismatches, "ok": not mismatches}


def compare_differentials(fk: FilteredComplex, r: int) -> bool:
    """Check that the page-r differential agrees across the two presentations.

    The direct cells embed in the turned cells; the comparison conjugates the
    induced map on direct cells by that embedding. Raises EngineError on
    disagreement.
    """
    ss = SpectralSequence(fk)
    pg = ss.page(r)
    direct = {pq: page_direct(fk, r, *pq) for pq in pg.support}
    trans = {}
    for pq, cell in direct.items():
        turned = pg.cell(*pq)
        cols = [turned.coset_coords(w) for w in cell.complement]
        trans[pq] = Matrix.from_cols(cols, rows=turned.dim)
    for (p, q) in pg.support:
        n = p + q
        tgt = (p + r, q - r + 1)
        if tgt not in direct:
            continue
        d_direct = induced_map(fk.cx.diff(n), direct[(p, q)], direct[tgt])
        lhs = trans[tgt] @ d_direct
        rhs = pg.diff(p, q) @ trans[(p, q)]
        if lhs != rhs:
            raise EngineError(f"page {r} differentials disagree at cell {(p, q)}")
    return True
