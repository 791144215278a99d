"""Bounded cochain complexes over Q with decreasing filtrations.

A CochainComplex stores one space per degree in a bounded range and the
differentials between them; d compose to zero by construction. A
FilteredComplex adds a decreasing, exhaustive, bounded filtration compatible
with d. Canonical truncations, windows, graded pieces and cohomology are all
returned in explicit bases so downstream code never sees abstract quotients.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InvariantError, ParseError
from .linalg import (
    Matrix,
    Subquotient,
    Subspace,
    image,
    induced_map,
    kernel,
    preimage,
    scalar_str,
    vec,
)


class CochainComplex:
    """Spaces K^n for lo <= n <= hi with differentials d^n : K^n -> K^{n+1}."""

    def __init__(self, lo: int, hi: int, dims: dict[int, int], d: dict[int, Matrix]):
        if lo > hi:
            raise InvariantError("empty degree range")
        self.lo = lo
        self.hi = hi
        self.dims = {n: int(dims.get(n, 0)) for n in range(lo, hi + 1)}
        if any(v < 0 for v in self.dims.values()):
            raise InvariantError("negative dimension")
        self.d = {}
        for n in range(lo, hi):
            mat = d.get(n)
            if mat is None:
                mat = Matrix.zeros(self.dims[n + 1], self.dims[n])
            if (mat.rows, mat.cols) != (self.dims[n + 1], self.dims[n]):
                raise InvariantError(f"differential at degree {n} has the wrong shape")
            self.d[n] = mat
        for n in range(lo, hi - 1):
            if not (self.d[n + 1] @ self.d[n]).is_zero():
                raise InvariantError(f"d o d != 0 between degrees {n} and {n + 2}", witness=n)

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def diff(self, n: int) -> Matrix:
        """d^n with zero fallback outside the stored range."""
        if n in self.d:
            return self.d[n]
        return Matrix.zeros(self.dim(n + 1), self.dim(n))

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def cohomology(self, n: int) -> Subquotient:
        """H^n(K) = ker d^n / im d^{n-1} as a subquotient of K^n."""
        if n < self.lo or n > self.hi:
            return Subquotient.zero(0)
        return Subquotient.of(kernel(self.diff(n)), image(self.diff(n - 1)))

    def betti(self, n: int) -> int:
        return self.cohomology(n).dim

    def truncate_below(self, p: int) -> "CochainComplex":
        """Canonical truncation keeping degrees <= p, with ker d^p at degree p."""
        if p >= self.hi:
            return self
        if p < self.lo:
            return CochainComplex(p, p, {p: 0}, {})
        ker = kernel(self.diff(p))
        dims = {n: self.dim(n) for n in range(self.lo, p)}
        dims[p] = ker.dim
        d = {n: self.d[n] for n in range(self.lo, p - 1)}
        if p - 1 >= self.lo:
            prev = self.diff(p - 1)
            cols = [ker.coords(prev.col(j)) for j in range(prev.cols)]
            d[p - 1] = Matrix.from_cols(cols, rows=ker.dim)
        return CochainComplex(self.lo, p, dims, d)

    def truncate_above(self, p: int) -> "CochainComplex":
        """Canonical truncation keeping degrees >= p, with K^p/im d^{p-1} at p."""
        if p <= self.lo:
            return self
        if p > self.hi:
            return CochainComplex(p, p, {p: 0}, {})
        quot = Subquotient.of(Subspace.full(self.dim(p)), image(self.diff(p - 1)))
        dims = {n: self.dim(n) for n in range(p + 1, self.hi + 1)}
        dims[p] = quot.dim
        d = {n: self.d[n] for n in range(p + 1, self.hi)}
        if p + 1 <= self.hi:
            nxt = self.diff(p)
            d[p] = Matrix.from_cols([nxt.apply(w) for w in quot.complement], rows=self.dim(p + 1))
        return CochainComplex(p, self.hi, dims, d)

    def window(self, p: int) -> "CochainComplex":
        """Two-term window: truncate below at p, then above at p - 1."""
        return self.truncate_below(p).truncate_above(p - 1)

    def to_json(self) -> dict:
        return {
            "degrees": [self.lo, self.hi],
            "dims": {str(n): self.dims[n] for n in self.degrees()},
            "d": {str(n): self.d[n].to_json() for n in range(self.lo, self.hi)},
        }

    @staticmethod
    def from_json(data: dict) -> "CochainComplex":
        try:
            lo, hi = (int(x) for x in data["degrees"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError("degrees must be a [lo, hi] pair", location="degrees") from exc
        dims_raw = data.get("dims", {})
        if not isinstance(dims_raw, dict):
            raise ParseError("dims must be an object", location="dims")
        try:
            dims = {int(k): int(v) for k, v in dims_raw.items()}
        except (TypeError, ValueError) as exc:
            raise ParseError("dims keys and values must be integers", location="dims") from exc
        d = {}
        d_raw = data.get("d", {})
        if not isinstance(d_raw, dict):
            raise ParseError("d must be an object", location="d")
        for k, matdata in d_raw.items():
            try:
                n = int(k)
            except ValueError as exc:
                raise ParseError(f"bad degree key {k!r}", location="d") from exc
            rows = dims.get(n + 1, 0)
            cols = dims.get(n, 0)
            d[n] = Matrix.from_json(matdata, rows=rows, cols=cols)
        try:
            return CochainComplex(lo, hi, dims, d)
        except InvariantError:
            raise

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CochainComplex)
            and self.lo == other.lo
            and self.hi == other.hi
            and self.dims == other.dims
            and self.d == other.d
        )


class Filtration:
    """Decreasing filtration: one Subspace of K^n per level p in [p_lo, p_top].

    Storage is complete over the rectangle of levels and degrees. F^{p_lo} is
    the whole space and F^{p_top} is zero in every degree; accessors clamp
    outside the range.
    """

    def __init__(self, p_lo: int, p_top: int, table: dict[tuple[int, int], Subspace]):
        if p_lo >= p_top:
            raise InvariantError("filtration needs at least the full and the zero level")
        degrees = sorted({n for (_, n) in table})

        def all_full(p: int) -> bool:
            return all((p, n) in table and table[(p, n)].is_full() for n in degrees)

        def all_zero(p: int) -> bool:
            return all((p, n) in table and table[(p, n)].is_zero() for n in degrees)

        # canonical tight bounds: drop redundant outer levels
        while p_lo + 1 < p_top and all_full(p_lo + 1):
            p_lo += 1
        while p_top - 1 > p_lo and all_zero(p_top - 1):
            p_top -= 1
        self.p_lo = p_lo
        self.p_top = p_top
        self.table = {
            (p, n): sub for (p, n), sub in table.items() if p_lo <= p <= p_top
        }

    @staticmethod
    def from_sparse(
        cx: CochainComplex, levels: dict[int, dict[int, Subspace]]
    ) -> "Filtration":
        """Complete a sparsely given filtration.

        For each degree the subspace is the full space below the first
        specified level, constant between specified levels, and zero from the
        top sentinel level onwards.
        """
        if not levels:
            p_lo, p_top = 0, 1
        else:
            p_lo = min(levels)
            p_top = max(levels) + 1
        table: dict[tuple[int, int], Subspace] = {}
        for n in cx.degrees():
            current = Subspace.full(cx.dim(n))
            for p in range(p_lo, p_top + 1):
                if p == p_top:
                    current = Subspace.zero(cx.dim(n))
                else:
                    spec = levels.get(p, {})
                    if n in spec:
                        current = spec[n]
                table[(p, n)] = current
        return Filtration(p_lo, p_top, table)

    def at(self, p: int, n: int, cx: CochainComplex) -> Subspace:
        if n < cx.lo or n > cx.hi:
            return Subspace.zero(0)
        if p < self.p_lo:
            return Subspace.full(cx.dim(n))
        if p > self.p_top:
            return Subspace.zero(cx.dim(n))
        return self.table[(p, n)]


class FilteredComplex:
    """A cochain complex together with a compatible decreasing filtration."""

    def __init__(self, cx: CochainComplex, filtration: Filtration):
        self.cx = cx
        self.filtration = filtration
        self._pre_cache: dict[tuple[int, int], Subspace] = {}
        self._validate()

    def _validate(self):
        f = self.filtration
        for n in self.cx.degrees():
            top = f.table.get((f.p_lo, n))
            if top is None:
                raise InvariantError(f"filtration table missing level {f.p_lo} at degree {n}")
            if not top.is_full():
                raise InvariantError(f"lowest filtration level is not the whole space at degree {n}")
            bottom = f.table.get((f.p_top, n))
            if bottom is None or not bottom.is_zero():
                raise InvariantError(f"highest filtration level is not zero at degree {n}")
            for p in range(f.p_lo, f.p_top + 1):
                sub = f.table.get((p, n))
                if sub is None:
                    raise InvariantError(f"filtration table missing level {p} at degree {n}")
                if sub.ambient_dim != self.cx.dim(n):
                    raise InvariantError(f"filtration level {p} has wrong ambient at degree {n}")
                if p > f.p_lo and not f.table[(p - 1, n)].contains(sub):
                    raise InvariantError(
                        f"filtration is not decreasing at level {p}, degree {n}"
                    )
        for n in range(self.cx.lo, self.cx.hi):
            d = self.cx.diff(n)
            for p in range(f.p_lo, f.p_top + 1):
                tgt = self.F(p, n + 1)
                for v in self.F(p, n).basis_rows:
                    if not tgt.contains_vector(d.apply(v)):
                        raise InvariantError(
                            f"differential leaves level {p} between degrees {n} and {n + 1}",
                            witness=[scalar_str(a) for a in v],
                        )

    @property
    def p_lo(self) -> int:
        return self.filtration.p_lo

    @property
    def p_top(self) -> int:
        return self.filtration.p_top

    def levels(self) -> range:
        """Levels at which the filtration can be a proper nonzero subspace."""
        return range(self.p_lo, self.p_top)

    def width(self) -> int:
        return (self.p_top - 1) - self.p_lo

    def F(self, p: int, n: int) -> Subspace:
        return self.filtration.at(p, n, self.cx)

    def d_preimage(self, p: int, n: int) -> Subspace:
        """Cached {x in K^n : d(x) in F^p K^{n+1}}."""
        key = (p, n)
        hit = self._pre_cache.get(key)
        if hit is None:
            hit = preimage(self.cx.diff(n), self.F(p, n + 1))
            self._pre_cache[key] = hit
        return hit

    def graded_piece(self, p: int) -> CochainComplex:
        """Gr^p = F^p/F^{p+1} with the induced differential, in explicit bases."""
        cells = {
            n: Subquotient.of(self.F(p, n), self.F(p + 1, n)) for n in self.cx.degrees()
        }
        dims = {n: cells[n].dim for n in self.cx.degrees()}
        d = {}
        for n in range(self.cx.lo, self.cx.hi):
            d[n] = induced_map(self.cx.diff(n), cells[n], cells[n + 1])
        return CochainComplex(self.cx.lo, self.cx.hi, dims, d)

    @staticmethod
    def with_trivial_filtration(cx: CochainComplex) -> "FilteredComplex":
        table = {}
        for n in cx.degrees():
            table[(0, n)] = Subspace.full(cx.dim(n))
            table[(1, n)] = Subspace.zero(cx.dim(n))
        return FilteredComplex(cx, Filtration(0, 1, table))

    @staticmethod
    def with_degree_filtration(cx: CochainComplex) -> "FilteredComplex":
        """Filtration by degree: F^p K^n is everything for n >= p, else zero."""
        table = {}
        for p in range(cx.lo, cx.hi + 2):
            for n in cx.degrees():
                table[(p, n)] = Subspace.full(cx.dim(n)) if n >= p else Subspace.zero(cx.dim(n))
        return FilteredComplex(cx, Filtration(cx.lo, cx.hi + 1, table))

    def to_json(self) -> dict:
        out = self.cx.to_json()
        filt: dict[str, dict[str, list]] = {}
        for p in range(self.p_lo, self.p_top + 1):
            filt[str(p)] = {
                str(n): self.F(p, n).to_json() for n in self.cx.degrees()
            }
        out["filtration"] = filt
        return out

    @staticmethod
    def from_json(data: dict) -> "FilteredComplex":
        cx = CochainComplex.from_json(data)
        filt_raw = data.get("filtration")
        if not isinstance(filt_raw, dict) or not filt_raw:
            raise ParseError("filtration must be a non-empty object", location="filtration")
        levels: dict[int, dict[int, Subspace]] = {}
        for pk, by_degree in filt_raw.items():
            try:
                p = int(pk)
            except ValueError as exc:
                raise ParseError(f"bad level key {pk!r}", location="filtration") from exc
            if not isinstance(by_degree, dict):
                raise ParseError(f"level {pk} must be an object", location="filtration")
            levels[p] = {}
            for nk, basis in by_degree.items():
                try:
                    n = int(nk)
                except ValueError as exc:
                    raise ParseError(f"bad degree key {nk!r}", location="filtration") from exc
                amb = cx.dim(n)
                if basis == []:
                    levels[p][n] = Subspace.zero(amb)
                    continue
                mat = Matrix.from_json(basis, rows=amb)
                levels[p][n] = Subspace.span(amb, mat.column_vectors())
        filtration = Filtration.from_sparse(cx, levels)
        return FilteredComplex(cx, filtration)
