"""Bigraded algebras, derivations, pairings vs the monomial oracle."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import el_add, el_mul, el_scale, monomial_derivative, sort_monomial
from specseq import (
    BigradedAlgebra,
    ComplexPairing,
    Derivation,
    CochainComplex,
    FilteredComplex,
    InvariantError,
    ObstructionDatum,
    SSPairing,
    d2_from_alpha,
    derivation_extend,
    induced_pairing,
    verify_leibniz,
)
from specseq.linalg import Matrix, Q1


def torus_words(n):
    """Oracle-side view of torus(n): generator order xi1..xin, eta1..etan."""
    names = [f"xi{i}" for i in range(1, n + 1)] + [f"eta{i}" for i in range(1, n + 1)]

    def degree_of(_):
        return 1

    def word_name(word):
        return "".join(names[i] for i in word) if word else "1"

    return names, degree_of, word_name


def basis_word(alg, i, names):
    """Recover the sorted generator word of a torus basis element by its name."""
    nm = alg.basis[i][0]
    if nm == "1":
        return ()
    out = []
    while nm:
        for g, gn in enumerate(names):
            if nm.startswith(gn) and (
                not nm[len(gn):] or not nm[len(gn):][0].isdigit()
            ):
                out.append(g)
                nm = nm[len(gn):]
                break
        else:
            raise AssertionError(f"cannot parse {alg.basis[i][0]}")
    return tuple(sorted(out))


def test_torus_structure_constants_match_exterior_oracle(torus2):
    alg = torus2.pa.A
    names, degree_of, word_name = torus_words(2)
    words = {i: basis_word(alg, i, names) for i in range(alg.dim())}
    name_of = {w: alg.basis[i][0] for i, w in words.items()}
    for i in range(alg.dim()):
        for j in range(alg.dim()):
            ours = {
                alg.basis[k][0]: c for k, c in alg.product_indices(i, j).items()
            }
            theirs = el_mul({words[i]: Q1}, {words[j]: Q1}, degree_of)
            theirs = {name_of[w]: c for w, c in theirs.items()}
            assert ours == theirs, (alg.basis[i][0], alg.basis[j][0])


def test_projective_space_products_match_truncated_powers(pn2):
    alg = pn2.pa.A
    cap = {0: 2}
    words = {0: (), 1: (0,), 2: (0, 0)}
    for i in range(3):
        for j in range(3):
            ours = dict(alg.product_indices(i, j))
            theirs = el_mul({words[i]: Q1}, {words[j]: Q1}, lambda g: 2, power_cap=cap)
            expect = {len(w): c for w, c in theirs.items()}
            assert ours == expect


def test_sign_flip_in_structure_constants_is_rejected(torus2):
    alg = torus2.pa.A
    i, j = alg.index("xi1"), alg.index("xi2")
    products = {ij: dict(tab) for ij, tab in alg.products.items()}
    products[(i, j)] = {k: -c for k, c in products[(i, j)].items()}
    with pytest.raises(InvariantError):
        BigradedAlgebra(alg.n, alg.basis, alg.unit, products)


def test_algebra_json_round_trip(torus2):
    alg = torus2.pa.A
    blob = alg.to_json()
    alg2 = BigradedAlgebra.from_json(blob)
    assert alg2.to_json() == blob
    assert alg2.basis == alg.basis


small_coeff = st.sampled_from(
    [Fraction(0), Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 2), Fraction(-3)]
)


@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_element_products_are_bilinear_and_graded_commutative(torus2, data):
    alg = torus2.pa.A
    names, degree_of, _ = torus_words(2)
    # random homogeneous elements from two cells
    cells = sorted(alg.cells)
    c1 = data.draw(st.sampled_from(cells))
    c2 = data.draw(st.sampled_from(cells))
    idx1, idx2 = alg.cell_indices(*c1), alg.cell_indices(*c2)
    x = alg.from_coeffs({i: data.draw(small_coeff) for i in idx1})
    y = alg.from_coeffs({j: data.draw(small_coeff) for j in idx2})
    z = alg.from_coeffs({j: data.draw(small_coeff) for j in idx2})
    assert x * (y + z) == x * y + x * z
    sign = -1 if (sum(c1) * sum(c2)) % 2 else 1
    assert x * y == (y * x).scaled(sign)


class TestDerivationExtend:
    def images(self, alg, c1, c2):
        eta = alg.el("eta1") * alg.el("eta2")
        return {
            alg.index("xi1"): eta.scaled(c1),
            alg.index("xi2"): eta.scaled(c2),
            alg.index("eta1"): alg.zero(),
            alg.index("eta2"): alg.zero(),
        }

    @pytest.mark.parametrize(
        "c1,c2",
        [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)),
         (Fraction(2, 3), Fraction(-1, 2))],
    )
    def test_extension_matches_leibniz_oracle(self, torus2, c1, c2):
        alg = torus2.pa.A
        d = derivation_extend(alg, (2, -1), self.images(alg, c1, c2))
        names, degree_of, _ = torus_words(2)
        words = {i: basis_word(alg, i, names) for i in range(alg.dim())}
        name_of = {w: alg.basis[i][0] for i, w in words.items()}
        eta_word = tuple(sorted((names.index("eta1"), names.index("eta2"))))
        oracle_images = {
            names.index("xi1"): {eta_word: c1} if c1 else {},
            names.index("xi2"): {eta_word: c2} if c2 else {},
        }
        for i in range(alg.dim()):
            ours = {alg.basis[k][0]: c for k, c in d.apply(alg.basis_element(i)).coeffs.items()}
            theirs = monomial_derivative(words[i], oracle_images, degree_of, 1)
            theirs = {name_of[w]: c for w, c in theirs.items() if c}
            assert ours == theirs, alg.basis[i][0]

    def test_frozen_product_image(self, torus2):
        # d(xi1) = eta1 eta2, d(xi2) = 0 forces d(xi1 xi2) = xi2 eta1 eta2
        alg = torus2.pa.A
        d = derivation_extend(alg, (2, -1), self.images(alg, Q1, Fraction(0)))
        img = d.apply(alg.el("xi1") * alg.el("xi2"))
        assert img == alg.el("xi2") * alg.el("eta1") * alg.el("eta2")
        ok, witness = verify_leibniz(alg, d)
        assert ok and witness is None

    def test_missing_generator_image_is_rejected(self, torus2):
        alg = torus2.pa.A
        with pytest.raises(InvariantError):
            derivation_extend(alg, (2, -1), {alg.index("xi1"): alg.zero()})

    def test_wrong_bidegree_image_is_rejected(self, torus2):
        alg = torus2.pa.A
        images = self.images(alg, Q1, Q1)
        images[alg.index("xi1")] = alg.el("eta1")
        with pytest.raises(InvariantError):
            derivation_extend(alg, (2, -1), images)

    def test_ungenerated_algebra_is_rejected(self, pn2):
        with pytest.raises(InvariantError, match="not generated"):
            derivation_extend(pn2.pa.A, (2, -1), {})

    def test_relation_inconsistency_has_witness(self):
        # x1 y = x2 y = w collapses a product; sending x1, x2 apart breaks it
        basis = [("1", 0, 0), ("x1", 0, 1), ("x2", 0, 1), ("y", 1, 0),
                 ("u", 0, 2), ("w", 1, 1)]
        products = {
            (1, 2): {4: Q1}, (2, 1): {4: -Q1},
            (1, 3): {5: Q1}, (3, 1): {5: -Q1},
            (2, 3): {5: Q1}, (3, 2): {5: -Q1},
        }
        for i in range(6):
            products[(0, i)] = {i: Q1}
            if i:
                products[(i, 0)] = {i: Q1}
        alg = BigradedAlgebra(1, basis, 0, products)
        images = {1: alg.el("x1"), 2: alg.zero(), 3: alg.zero()}
        with pytest.raises(InvariantError, match="relation") as err:
            derivation_extend(alg, (0, 0), images)
        assert err.value.witness


class TestDerivation:
    def alpha_derivation(self, model, scale=Q1):
        alg = model.pa.A
        od = ObstructionDatum(
            model, {alg.index("xi1"): alg.el("eta1") * alg.el("eta2")}, scale
        )
        return d2_from_alpha(od)

    def test_squares_to_zero_with_witness(self, torus2):
        d = self.alpha_derivation(torus2)
        ok, witness = d.squares_to_zero()
        assert ok and witness is None
        # contraction-like derivation of bidegree (1, -1) does not square to zero
        alg = torus2.pa.A
        images = {
            alg.index("xi1"): alg.el("eta1"),
            alg.index("xi2"): alg.el("eta2"),
            alg.index("eta1"): alg.zero(),
            alg.index("eta2"): alg.zero(),
        }
        k = derivation_extend(alg, (1, -1), images)
        ok2, witness2 = k.squares_to_zero()
        assert not ok2
        assert witness2 == "xi1xi2"

    def test_corrupted_value_breaks_leibniz_with_witness(self, torus2):
        alg = torus2.pa.A
        d = self.alpha_derivation(torus2)
        values = list(d.values)
        i = alg.index("xi1xi2")
        assert not values[i].is_zero()
        values[i] = values[i].scaled(Fraction(-1))
        with pytest.raises(InvariantError):
            Derivation(alg, (2, -1), values, check=True)
        bad = Derivation(alg, (2, -1), values, check=False)
        ok, witness = verify_leibniz(alg, bad)
        assert not ok
        assert witness is not None and len(witness) == 2

    def test_cohomology_dims_of_zero_derivation(self, torus2):
        alg = torus2.pa.A
        zero = Derivation(alg, (2, -1), [alg.zero()] * alg.dim())
        dims = zero.cohomology_dims()
        assert dims == {c: len(ix) for c, ix in alg.cells.items()}

    def test_cohomology_dims_of_alpha_derivation_frozen(self, torus2):
        # hand computation: Lambda = A + xi1 A with A = Lambda(xi2, eta1, eta2);
        # d(a + xi1 b) = eta1 eta2 b, so E3 = A/(eta1 eta2 A) + xi1 ker
        d = self.alpha_derivation(torus2)
        dims = d.cohomology_dims()
        assert dims == {
            (0, 0): 1, (0, 1): 1, (0, 2): 0, (1, 0): 2, (1, 1): 4,
            (1, 2): 2, (2, 0): 0, (2, 1): 1, (2, 2): 1,
        }
        assert sum(dims.values()) == 12

    def test_cohomology_dims_requires_square_zero(self, torus2):
        alg = torus2.pa.A
        images = {
            alg.index("xi1"): alg.el("eta1"),
            alg.index("xi2"): alg.el("eta2"),
            alg.index("eta1"): alg.zero(),
            alg.index("eta2"): alg.zero(),
        }
        k = derivation_extend(alg, (1, -1), images)
        with pytest.raises(InvariantError):
            k.cohomology_dims()

    def test_scaling_and_composition(self, torus2):
        d1 = self.alpha_derivation(torus2)
        d3 = self.alpha_derivation(torus2, Fraction(3))
        assert d1.scaled(Fraction(3)).values == d3.values
        assert d1.compose(d1).is_zero()

    def test_derivation_json_round_trip(self, torus2):
        d = self.alpha_derivation(torus2, Fraction(5, 7))
        blob = d.to_json()
        d2 = Derivation.from_json(torus2.pa.A, blob)
        assert d2.values == d.values
        assert d2.bidegree == d.bidegree


def de_rham_pairing(model):
    """Self-pairing of the zero-differential complex built from the algebra."""
    alg = model.pa.A
    degs = sorted({p + q for (p, q) in alg.cells})
    dims = {m: len(alg.degree_indices(m)) for m in range(degs[0], degs[-1] + 1)}
    cx = CochainComplex(degs[0], degs[-1], dims, {})
    fk = FilteredComplex.with_trivial_filtration(cx)
    pos = {
        m: {k: t for t, k in enumerate(alg.degree_indices(m))}
        for m in dims
    }
    tensors = {}
    for m in dims:
        for n in dims:
            if m + n not in dims or not dims[m] or not dims[n]:
                continue
            mats = []
            for i in alg.degree_indices(m):
                cols = []
                for j in alg.degree_indices(n):
                    out = [Fraction(0)] * dims[m + n]
                    for k, c in alg.product_indices(i, j).items():
                        out[pos[m + n][k]] = c
                    cols.append(tuple(out))
                mats.append(Matrix.from_cols(cols, rows=dims[m + n]))
            tensors[(m, n)] = tuple(mats)
    return fk, ComplexPairing(fk, fk, fk, tensors)


def test_de_rham_cup_products_match_wedge(torus2):
    fk, cp = de_rham_pairing(torus2)
    ssp = SSPairing(cp)
    ok, witness = ssp.verify_page_leibniz(1)
    assert ok, witness
    alg = torus2.pa.A
    # trivial filtration puts H^m in cell (0, m); cup there is the wedge table
    for (m, n) in [(1, 1), (1, 2), (2, 2)]:
        mats = ssp.pairing_at(1, (0, m), (0, n))
        rows_idx = alg.degree_indices(m)
        for t, i in enumerate(rows_idx):
            expect_cols = []
            for j in alg.degree_indices(n):
                out = [Fraction(0)] * len(alg.degree_indices(m + n))
                pos = {k: s for s, k in enumerate(alg.degree_indices(m + n))}
                for k, c in alg.product_indices(i, j).items():
                    out[pos[k]] = c
                expect_cols.append(tuple(out))
            assert mats[t] == Matrix.from_cols(
                expect_cols, rows=len(alg.degree_indices(m + n))
            )


def test_induced_pairing_carries_to_later_pages(torus2):
    fk, cp = de_rham_pairing(torus2)
    ssp = SSPairing(cp)
    nxt = induced_pairing(ssp, 1)
    # zero differentials: page 2 pairing has the same structure constants
    for key, mats in nxt.items():
        c1, c2 = key
        assert mats == ssp.pairing_at(1, c1, c2)


def test_pairing_rejects_leibniz_violation(acyclic_fk):
    fk = acyclic_fk
    one = Matrix.from_rows([[1]])
    tensors = {(0, 0): (one,)}
    with pytest.raises(InvariantError):
        ComplexPairing(fk, fk, fk, tensors)


def test_pairing_zero_tensors_always_valid(acyclic_fk):
    fk = acyclic_fk
    cp = ComplexPairing(fk, fk, fk, {})
    ssp = SSPairing(cp)
    for r in (1, 2):
        ok, witness = ssp.verify_page_leibniz(r)
        assert ok, witness
    for (c1, c2) in ssp.support_pairs(2):
        for mat in ssp.pairing_at(2, c1, c2):
            assert mat.is_zero()
