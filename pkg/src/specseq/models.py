"""Model second pages E2^{p,q} = H^p(L, Omega^q) with cup product.

Builders produce polarized bigraded algebras for torus models (exterior
algebras on xi_i in (0,1) and eta_i in (1,0) with omega = sum xi_i eta_i),
projective-space models (truncated polynomial on a (1,1) class), and Koszul
tensor products of models. Cohomology ranks of anything else are user input:
the lci table assembles shapes, it never computes sheaf cohomology.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import BigradedAlgebra, Derivation, Element, derivation_extend
from .errors import InvariantError, ParseError
from .lefschetz import PolarizedAlgebra
from .linalg import Q0, Q1, scalar, scalar_str


@dataclass(frozen=True)
class HodgeDiamond:
    """Dimension table h^{p,q}, 0 <= p,q <= n, with the classical symmetries."""

    n: int
    h: dict[tuple[int, int], int]

    def __post_init__(self):
        n = self.n
        for (p, q), v in self.h.items():
            if not (0 <= p <= n and 0 <= q <= n):
                raise InvariantError(f"Hodge index {(p, q)} outside the {n}x{n} square")
            if v < 0:
                raise InvariantError(f"negative Hodge number at {(p, q)}")
        if self.at(0, 0) != 1 or self.at(n, n) != 1:
            raise InvariantError("corner Hodge numbers must be 1")
        for p in range(n + 1):
            for q in range(n + 1):
                if self.at(p, q) != self.at(q, p):
                    raise InvariantError(
                        f"Hodge symmetry fails at {(p, q)}", witness=[p, q]
                    )
                if self.at(p, q) != self.at(n - p, n - q):
                    raise InvariantError(
                        f"Serre symmetry fails at {(p, q)}", witness=[p, q]
                    )

    def at(self, p: int, q: int) -> int:
        return self.h.get((p, q), 0)

    def betti(self, m: int) -> int:
        return sum(v for (p, q), v in self.h.items() if p + q == m)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "h": {f"{p},{q}": v for (p, q), v in sorted(self.h.items()) if v},
        }


@dataclass
class VarietyModel:
    """A named polarized algebra plus generator roles.

    roles lists the basis names modelling H^0(Omega^1) (cell (0,1)) and
    H^1(O) (cell (1,0)).
    """

    name: str
    pa: PolarizedAlgebra
    roles: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.roles:
            alg = self.pa.A
            self.roles = {
                "h0_omega1": [alg.basis[i][0] for i in alg.cell_indices(0, 1)],
                "h1_O": [alg.basis[i][0] for i in alg.cell_indices(1, 0)],
            }
        self.diamond()

    @property
    def n(self) -> int:
        return self.pa.n

    def diamond(self) -> HodgeDiamond:
        alg = self.pa.A
        h = {}
        for (p, q), idx in alg.cells.items():
            if not (0 <= p <= self.n and 0 <= q <= self.n):
                raise InvariantError(f"model cell {(p, q)} outside the Hodge square")
            h[(p, q)] = len(idx)
        return HodgeDiamond(self.n, h)

    def to_json(self) -> dict:
        out = self.pa.A.to_json()
        out["name"] = self.name
        out["omega"] = self.pa.omega.to_json()
        out["integral"] = {
            str(i): scalar_str(c) for i, c in sorted(self.pa.integral.items())
        }
        out["roles"] = {k: list(v) for k, v in sorted(self.roles.items())}
        return out

    @staticmethod
    def from_json(data: dict, check: bool = True) -> "VarietyModel":
        alg = BigradedAlgebra.from_json(data, check=check)
        name = data.get("name")
        if not isinstance(name, str) or not name:
            raise ParseError("model needs a name", location="name")
        omega_raw = data.get("omega")
        if not isinstance(omega_raw, dict):
            raise ParseError("model needs an omega element", location="omega")
        try:
            omega = alg.from_coeffs({int(k): scalar(v) for k, v in omega_raw.items()})
        except (TypeError, ValueError, ParseError) as exc:
            raise ParseError("bad omega coefficients", location="omega") from exc
        integral_raw = data.get("integral")
        if not isinstance(integral_raw, dict):
            raise ParseError("model needs an integral", location="integral")
        try:
            integral = {int(k): scalar(v) for k, v in integral_raw.items()}
        except (TypeError, ValueError, ParseError) as exc:
            raise ParseError("bad integral coefficients", location="integral") from exc
        pa = PolarizedAlgebra(alg, omega, integral, check=check)
        roles_raw = data.get("roles", {})
        if not isinstance(roles_raw, dict):
            raise ParseError("roles must be an object", location="roles")
        roles = {str(k): [str(x) for x in v] for k, v in roles_raw.items()}
        return VarietyModel(name, pa, roles)


def _exterior_algebra(n: int, gens: list[tuple[str, int, int]]) -> BigradedAlgebra:
    """Exterior algebra on odd-degree generators, basis ordered by (size, subset)."""
    for (nm, p, q) in gens:
        if (p + q) % 2 == 0:
            raise InvariantError(f"exterior generator {nm} must have odd total degree")
    g = len(gens)
    subsets = []
    for mask in range(1 << g):
        sub = tuple(i for i in range(g) if mask >> i & 1)
        subsets.append(sub)
    subsets.sort(key=lambda s: (len(s), s))
    index = {s: t for t, s in enumerate(subsets)}
    basis = []
    for sub in subsets:
        if not sub:
            basis.append(("1", 0, 0))
            continue
        nm = "".join(gens[i][0] for i in sub)
        p = sum(gens[i][1] for i in sub)
        q = sum(gens[i][2] for i in sub)
        basis.append((nm, p, q))
    products: dict[tuple[int, int], dict[int, Fraction]] = {}
    for si, s in enumerate(subsets):
        for ti, t in enumerate(subsets):
            if set(s) & set(t):
                continue
            inversions = sum(1 for a in s for b in t if a > b)
            sign = Q1 if inversions % 2 == 0 else -Q1
            merged = tuple(sorted(s + t))
            products[(si, ti)] = {index[merged]: sign}
    return BigradedAlgebra(n, basis, index[()], products)


@functools.lru_cache(maxsize=None)
def _torus_model(n: int) -> VarietyModel:
    if n < 1:
        raise InvariantError("torus model needs n >= 1")
    gens = [(f"xi{i}", 0, 1) for i in range(1, n + 1)]
    gens += [(f"eta{i}", 1, 0) for i in range(1, n + 1)]
    alg = _exterior_algebra(n, gens)
    omega = alg.zero()
    for i in range(1, n + 1):
        omega = omega + alg.el(f"xi{i}") * alg.el(f"eta{i}")
    top_name = "".join(f"xi{i}" for i in range(1, n + 1)) + "".join(
        f"eta{i}" for i in range(1, n + 1)
    )
    # the interleaved volume xi1 eta1 ... xin etan integrates to 1
    sign = Q1 if (n * (n - 1) // 2) % 2 == 0 else -Q1
    integral = {alg.index(top_name): sign}
    pa = PolarizedAlgebra(alg, omega, integral)
    return VarietyModel(f"torus{n}", pa)


@functools.lru_cache(maxsize=None)
def _projective_space_model(n: int) -> VarietyModel:
    if n < 1:
        raise InvariantError("projective-space model needs n >= 1")
    basis = [("1", 0, 0), ("w", 1, 1)]
    basis += [(f"w^{k}", k, k) for k in range(2, n + 1)]
    products: dict[tuple[int, int], dict[int, Fraction]] = {}
    for a in range(n + 1):
        for b in range(n + 1):
            if a + b <= n:
                products[(a, b)] = {a + b: Q1}
    alg = BigradedAlgebra(n, basis, 0, products)
    pa = PolarizedAlgebra(alg, alg.el("w"), {n: Q1})
    return VarietyModel(f"pn{n}", pa)


def tensor_model(m1: VarietyModel, m2: VarietyModel, name: str | None = None) -> VarietyModel:
    """Graded tensor product with Koszul signs and Kuenneth bigrading."""
    a1, a2 = m1.pa.A, m2.pa.A
    n = a1.n + a2.n
    pairs = [(i, j) for i in range(a1.dim()) for j in range(a2.dim())]
    index = {ij: t for t, ij in enumerate(pairs)}
    basis = []
    for (i, j) in pairs:
        n1, p1, q1 = a1.basis[i]
        n2, p2, q2 = a2.basis[j]
        basis.append((f"{n1}|{n2}", p1 + p2, q1 + q2))
    products: dict[tuple[int, int], dict[int, Fraction]] = {}
    for s, (i1, i2) in enumerate(pairs):
        deg_i2 = a2.total_degree_of(i2)
        for t, (j1, j2) in enumerate(pairs):
            deg_j1 = a1.total_degree_of(j1)
            sign = -Q1 if (deg_i2 * deg_j1) % 2 else Q1
            left = a1.product_indices(i1, j1)
            right = a2.product_indices(i2, j2)
            if not left or not right:
                continue
            tab: dict[int, Fraction] = {}
            for k1, c1 in left.items():
                for k2, c2 in right.items():
                    tab[index[(k1, k2)]] = tab.get(index[(k1, k2)], Q0) + sign * c1 * c2
            products[(s, t)] = tab
    alg = BigradedAlgebra(n, basis, index[(a1.unit, a2.unit)], products)
    omega = alg.zero()
    for i, c in m1.pa.omega.coeffs.items():
        omega = omega + alg.basis_element(index[(i, a2.unit)]).scaled(c)
    for j, c in m2.pa.omega.coeffs.items():
        omega = omega + alg.basis_element(index[(a1.unit, j)]).scaled(c)
    integral = {}
    for i, c1 in m1.pa.integral.items():
        for j, c2 in m2.pa.integral.items():
            integral[index[(i, j)]] = c1 * c2
    pa = PolarizedAlgebra(alg, omega, integral)
    return VarietyModel(name or f"{m1.name}x{m2.name}", pa)


def build_model(kind: str, n: int | None = None,
                a: VarietyModel | None = None, b: VarietyModel | None = None) -> VarietyModel:
    """torus(n), projective_space(n), or product(a, b)."""
    kind = kind.lower()
    if kind == "torus":
        if n is None:
            raise InvariantError("torus model needs n")
        return _torus_model(n)
    if kind in ("pn", "projective_space"):
        if n is None:
            raise InvariantError("projective-space model needs n")
        return _projective_space_model(n)
    if kind == "product":
        if a is None or b is None:
            raise InvariantError("product model needs both factors")
        return tensor_model(a, b)
    raise InvariantError(f"unknown model kind {kind!r}")


def lagrangian_e2_table(model: VarietyModel) -> dict[tuple[int, int], int]:
    """Bigraded dimension table of the model's algebra."""
    return {
        (p, q): len(idx) for (p, q), idx in sorted(model.pa.A.cells.items())
    }


@dataclass
class ObstructionDatum:
    """Images of the (0,1)-generators plus a rational scale.

    alpha maps basis indices of cell (0,1) to elements of cell (2,0); the
    induced bidegree-(2,-1) derivation is the Leibniz extension of
    scale * alpha on those generators and zero on the (1,0) generators.
    """

    model: VarietyModel
    alpha: dict[int, Element]
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        self.scale = scalar(self.scale)
        alg = self.model.pa.A
        gen01 = set(alg.cell_indices(0, 1))
        for i, img in self.alpha.items():
            if i not in gen01:
                raise InvariantError(
                    f"alpha keyed by {alg.basis[i][0]}, which is not a (0,1) generator"
                )
            for k in img.coeffs:
                if alg.bidegree_of(k) != (2, 0):
                    raise InvariantError(
                        f"alpha image of {alg.basis[i][0]} must lie in cell (2, 0)",
                        witness=alg.basis[k][0],
                    )

    def is_zero(self) -> bool:
        return self.scale == 0 or all(v.is_zero() for v in self.alpha.values())

    def to_json(self) -> dict:
        alg = self.model.pa.A
        return {
            "scale": scalar_str(self.scale),
            "images": {
                alg.basis[i][0]: {
                    alg.basis[k][0]: scalar_str(c) for k, c in sorted(v.coeffs.items())
                }
                for i, v in sorted(self.alpha.items())
            },
        }

    @staticmethod
    def from_json(model: VarietyModel, data: dict) -> "ObstructionDatum":
        alg = model.pa.A
        scale = data.get("scale", "1")
        try:
            scale = scalar(scale)
        except (TypeError, ValueError, ParseError) as exc:
            raise ParseError("bad scale", location="scale") from exc
        images_raw = data.get("images", {})
        if not isinstance(images_raw, dict):
            raise ParseError("images must be an object", location="images")
        alpha = {}
        for gname, tab in images_raw.items():
            if not isinstance(tab, dict):
                raise ParseError(f"image of {gname!r} must be an object", location="images")
            try:
                coeffs = {alg.index(str(k)): scalar(v) for k, v in tab.items()}
            except (TypeError, ValueError, ParseError) as exc:
                raise ParseError(f"bad coefficients for {gname!r}", location="images") from exc
            alpha[alg.index(gname)] = alg.from_coeffs(coeffs)
        return ObstructionDatum(model, alpha, scale)


def d2_from_alpha(od: ObstructionDatum) -> Derivation:
    """The bidegree-(2,-1) derivation induced by an obstruction datum.

    Zero data yield the zero derivation on any model; nonzero data require
    the model algebra to be generated in total degree 1.
    """
    alg = od.model.pa.A
    if od.is_zero():
        return Derivation(alg, (2, -1), [alg.zero()] * alg.dim(), check=True)
    images: dict[int, Element] = {}
    for i in range(alg.dim()):
        if alg.total_degree_of(i) != 1:
            continue
        if alg.bidegree_of(i) == (0, 1):
            images[i] = od.alpha.get(i, alg.zero()).scaled(od.scale)
        else:
            images[i] = alg.zero()
    return derivation_extend(alg, (2, -1), images)


def canonical_power_datum(model: VarietyModel, s: int = 1, t: int = 1) -> ObstructionDatum:
    """Datum of a power K_L^{s/t} of the canonical class on a trivial-canonical model.

    The obstruction class vanishes, so alpha = 0 at any scale s/t.
    """
    if t == 0:
        raise InvariantError("denominator of the power must be nonzero")
    return ObstructionDatum(model, {}, Fraction(s, t))


def ext_dimensions(model: VarietyModel, degenerate: bool = True) -> list[int]:
    """dim Ext^k = sum over p+q = k of the E2 cell dimensions, k = 0..2n."""
    if not degenerate:
        raise InvariantError(
            "only the degenerate branch is implemented: "
            "Ext dimensions of a non-degenerate page are not determined by the table"
        )
    n = model.n
    out = [0] * (2 * n + 1)
    for (p, q), idx in model.pa.A.cells.items():
        out[p + q] += len(idx)
    return out


@dataclass(frozen=True)
class LciTable:
    """E2 shape for an lci embedding of codimension c; q runs over [0, c]."""

    codim: int
    table: dict[tuple[int, int], int]
    product_rule: str = "exterior"

    def to_json(self) -> dict:
        return {
            "codim": self.codim,
            "product_rule": self.product_rule,
            "table": {f"{p},{q}": v for (p, q), v in sorted(self.table.items()) if v},
        }


def lci_e2_table(c: int, input_dims: dict[tuple[int, int], int]) -> LciTable:
    """Assemble the lci E2 table from user-supplied cohomology ranks.

    Nonzero entries with q outside [0, c] are rejected; the Yoneda product is
    tagged as exterior multiplication in the q-index.
    """
    if c < 0:
        raise InvariantError("codimension must be non-negative")
    table = {}
    for (p, q), v in input_dims.items():
        if v == 0:
            continue
        if v < 0:
            raise InvariantError(f"negative dimension at {(p, q)}")
        if not (0 <= q <= c):
            raise InvariantError(
                f"nonzero entry at q = {q} outside the vanishing range [0, {c}]",
                witness=[p, q],
            )
        if p < 0:
            raise InvariantError(f"negative cohomological degree at {(p, q)}")
        table[(p, q)] = int(v)
    return LciTable(c, table)
