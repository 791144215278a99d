"""Complexes, truncations, graded pieces, filtration validation, JSON."""

import pytest

from oracles import naive_rank
from specseq import CochainComplex, FilteredComplex, Filtration, InvariantError
from specseq.fuzz import random_filtered_complex
from specseq.linalg import Matrix, Subspace, vec

from conftest import seeded


def koszul_like() -> CochainComplex:
    # 0 -> Q -> Q^2 -> Q -> 0 with H^0 = H^2 = 0, H^1 = 0 (exact)
    d0 = Matrix.from_rows([[1], [1]])
    d1 = Matrix.from_rows([[1, -1]])
    return CochainComplex(0, 2, {0: 1, 1: 2, 2: 1}, {0: d0, 1: d1})


def circle_like() -> CochainComplex:
    # 0 -> Q^2 -> Q^2 -> 0 with rank-1 differential: H^0 = H^1 = Q
    d0 = Matrix.from_rows([[1, -1], [0, 0]])
    return CochainComplex(0, 1, {0: 2, 1: 2}, {0: d0})


def test_cohomology_frozen_examples():
    k = koszul_like()
    assert [k.betti(n) for n in range(3)] == [0, 0, 0]
    c = circle_like()
    assert [c.betti(n) for n in range(2)] == [1, 1]


def test_square_zero_is_enforced():
    bad = Matrix.from_rows([[1]])
    with pytest.raises(InvariantError):
        CochainComplex(0, 2, {0: 1, 1: 1, 2: 1}, {0: bad, 1: bad})


@pytest.mark.parametrize("seed", range(12))
def test_betti_matches_rank_nullity_oracle(seed):
    fk = random_filtered_complex(seeded("betti", seed))
    cx = fk.cx
    for n in cx.degrees():
        rk_out = naive_rank([list(r) for r in cx.diff(n).entries]) if cx.dim(n) else 0
        dprev = cx.diff(n - 1)
        rk_in = naive_rank([list(r) for r in dprev.entries]) if dprev.cols else 0
        assert cx.betti(n) == cx.dim(n) - rk_out - rk_in


@pytest.mark.parametrize("seed", range(8))
def test_truncations_preserve_cohomology_in_window(seed):
    cx = random_filtered_complex(seeded("trunc", seed)).cx
    mid = (cx.lo + cx.hi) // 2
    below = cx.truncate_below(mid)
    above = cx.truncate_above(mid)
    for n in cx.degrees():
        if n <= mid:
            assert below.betti(n) == cx.betti(n)
        else:
            assert below.betti(n) == 0
        if n >= mid:
            assert above.betti(n) == cx.betti(n)
        else:
            assert above.betti(n) == 0


@pytest.mark.parametrize("seed", range(8))
def test_window_keeps_two_cohomologies(seed):
    cx = random_filtered_complex(seeded("window", seed)).cx
    if cx.hi == cx.lo:
        pytest.skip("single-degree complex has no two-term window")
    p = max(cx.lo + 1, (cx.lo + cx.hi) // 2)
    w = cx.window(p)
    assert (w.lo, w.hi) == (p - 1, p)
    assert w.betti(p - 1) == cx.betti(p - 1)
    assert w.betti(p) == cx.betti(p)


@pytest.mark.parametrize("seed", range(10))
def test_graded_pieces_partition_dimension(seed):
    fk = random_filtered_complex(seeded("graded", seed))
    grs = {p: fk.graded_piece(p) for p in fk.levels()}
    for n in fk.cx.degrees():
        assert sum(g.dim(n) for g in grs.values()) == fk.cx.dim(n)


def test_trivial_and_degree_filtrations():
    cx = circle_like()
    triv = FilteredComplex.with_trivial_filtration(cx)
    assert triv.width() == 0
    gr0 = triv.graded_piece(0)
    assert [gr0.dim(n) for n in cx.degrees()] == [2, 2]
    bete = FilteredComplex.with_degree_filtration(cx)
    for p in bete.levels():
        gr = bete.graded_piece(p)
        for n in cx.degrees():
            assert gr.dim(n) == (cx.dim(n) if n == p else 0)


def test_filtration_must_be_decreasing():
    cx = circle_like()
    table = {
        (0, 0): Subspace.full(2),
        (0, 1): Subspace.full(2),
        (1, 0): Subspace.span(2, [vec([1, 0])]),
        (1, 1): Subspace.full(2),
        (2, 0): Subspace.full(2),
        (2, 1): Subspace.zero(2),
        (3, 0): Subspace.zero(2),
        (3, 1): Subspace.zero(2),
    }
    with pytest.raises(InvariantError):
        FilteredComplex(cx, Filtration(0, 3, table))


def test_differential_must_preserve_filtration():
    cx = circle_like()
    # F^1 K^0 = span(e1) maps onto span((1,0)) which is not inside F^1 K^1 = 0
    levels = {
        0: {0: Subspace.full(2), 1: Subspace.full(2)},
        1: {0: Subspace.span(2, [vec([1, 0])]), 1: Subspace.zero(2)},
        2: {0: Subspace.zero(2)},
    }
    with pytest.raises(InvariantError):
        FilteredComplex(cx, Filtration.from_sparse(cx, levels))


def test_filtration_accessors_clamp(acyclic_fk):
    fk = acyclic_fk
    assert fk.F(fk.p_lo - 5, 0).is_full()
    assert fk.F(fk.p_top + 5, 0).is_zero()
    assert fk.F(0, 99).ambient_dim == 0


@pytest.mark.parametrize("seed", range(10))
def test_filtered_json_round_trip(seed):
    fk = random_filtered_complex(seeded("json", seed))
    blob = fk.to_json()
    fk2 = FilteredComplex.from_json(blob)
    assert fk2.to_json() == blob
    assert fk2.cx == fk.cx
    assert (fk2.p_lo, fk2.p_top) == (fk.p_lo, fk.p_top)
    for p in fk.levels():
        for n in fk.cx.degrees():
            assert fk2.F(p, n).basis_rows == fk.F(p, n).basis_rows


def test_complex_json_rejects_malformed():
    from specseq import ParseError

    with pytest.raises(ParseError):
        CochainComplex.from_json({"degrees": "nope"})
    with pytest.raises(ParseError):
        CochainComplex.from_json({"degrees": [0, 1], "dims": {"0": 1, "1": 1}, "d": {"0": "x"}})
