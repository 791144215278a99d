"""Exact linear algebra against the naive oracle plus hypothesis invariants."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    intersection_dim,
    naive_nullspace,
    naive_rank,
    naive_rref,
    naive_solve,
    spans_equal,
)
from specseq import InvariantError, Matrix, Subquotient, Subspace, pairing_rank
from specseq.linalg import induced_map, kernel, image, preimage, vec

entries = st.integers(min_value=-6, max_value=6).map(Fraction)


def matrices(max_rows=5, max_cols=5, elems=entries):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(
                st.lists(elems, min_size=c, max_size=c), min_size=r, max_size=r
            )
        )
    )


def test_rank_matches_oracle_on_fixed_cases():
    cases = [
        [[1, 2], [2, 4]],
        [[1, 0, 1], [0, 1, 1], [1, 1, 2]],
        [[0, 0], [0, 0]],
        [[1, 2, 3], [4, 5, 6], [7, 8, 10]],
    ]
    for rows in cases:
        m = Matrix.from_rows(rows)
        assert m.rank() == naive_rank(rows)


@given(rows=matrices())
@settings(max_examples=150, deadline=None)
def test_rank_matches_oracle(rows):
    assert Matrix.from_rows(rows).rank() == naive_rank(rows)


@given(rows=matrices())
@settings(max_examples=150, deadline=None)
def test_rank_nullity(rows):
    m = Matrix.from_rows(rows)
    assert m.rank() + len(m.nullspace()) == m.cols


@given(rows=matrices())
@settings(max_examples=100, deadline=None)
def test_nullspace_matches_oracle_span(rows):
    m = Matrix.from_rows(rows)
    ours = [list(v) for v in m.nullspace()]
    theirs = naive_nullspace(rows, m.cols)
    assert spans_equal(ours, theirs, m.cols)


@given(rows=matrices(), target=st.lists(entries, min_size=5, max_size=5))
@settings(max_examples=100, deadline=None)
def test_solve_matches_oracle(rows, target):
    m = Matrix.from_rows(rows)
    b = tuple(target[: m.rows])
    ours = m.solve(b)
    theirs = naive_solve(rows, list(b))
    if theirs is None:
        assert ours is None
    else:
        assert ours is not None
        assert m.apply(ours) == b


def test_span_canonical_basis_examples():
    s = Subspace.span(2, [vec([2, 4]), vec([1, 2])])
    assert s.dim == 1
    assert s.basis_rows == (vec([1, 2]),)
    full = Subspace.span(2, [vec([1, 1]), vec([1, -1])])
    assert full.is_full()
    assert full.basis_rows == (vec([1, 0]), vec([0, 1]))


@given(
    vectors=st.lists(st.lists(entries, min_size=4, max_size=4), min_size=1, max_size=5),
    scale=st.sampled_from([Fraction(2), Fraction(-1), Fraction(1, 3), Fraction(5, 2)]),
)
@settings(max_examples=100, deadline=None)
def test_span_invariant_under_permutation_and_scaling(vectors, scale):
    s1 = Subspace.span(4, [vec(v) for v in vectors])
    s2 = Subspace.span(4, [vec(v) for v in reversed(vectors)])
    s3 = Subspace.span(4, [tuple(scale * x for x in vec(v)) for v in vectors])
    assert s1.basis_rows == s2.basis_rows == s3.basis_rows
    assert spans_equal([list(r) for r in s1.basis_rows], vectors, 4)
    assert [list(r) for r in s1.basis_rows] == naive_rref(vectors or [[0, 0, 0, 0]])


@given(
    u=st.lists(st.lists(entries, min_size=4, max_size=4), min_size=0, max_size=4),
    v=st.lists(st.lists(entries, min_size=4, max_size=4), min_size=0, max_size=4),
)
@settings(max_examples=100, deadline=None)
def test_sum_and_intersection_dimension_formula(u, v):
    su = Subspace.span(4, [vec(x) for x in u])
    sv = Subspace.span(4, [vec(x) for x in v])
    both = su.sum_with(sv)
    meet = su.intersect(sv)
    assert both.dim + meet.dim == su.dim + sv.dim
    if u or v:
        assert meet.dim == intersection_dim(u or [[0] * 4], v or [[0] * 4])
    assert meet.contains(su) or meet.dim <= su.dim
    assert su.contains(meet) and sv.contains(meet)
    assert both.contains(su) and both.contains(sv)


def test_subquotient_complement_and_coords():
    z = Subspace.span(3, [vec([1, 0, 0]), vec([0, 1, 0])])
    b = Subspace.span(3, [vec([0, 1, 0])])
    sq = Subquotient.of(z, b)
    assert sq.dim == 1
    assert sq.complement == (vec([1, 0, 0]),)
    assert sq.coset_coords(vec([1, 5, 0])) == vec([1])
    with pytest.raises(InvariantError):
        sq.coset_coords(vec([0, 0, 1]))


def test_kernel_image_preimage_consistency():
    d = Matrix.from_rows([[1, 1, 0], [0, 0, 0]])
    k = kernel(d)
    im = image(d)
    assert k.dim == 2 and im.dim == 1
    w = Subspace.span(2, [vec([1, 0])])
    pre = preimage(d, w)
    assert pre.is_full()
    assert preimage(d, Subspace.zero(2)).basis_rows == k.basis_rows


def test_induced_map_identity_and_frozen_value():
    z = Subspace.span(2, [vec([1, 0])])
    sq = Subquotient.of(z, Subspace.zero(2))
    m = Matrix.identity(2)
    ind = induced_map(m, sq, sq)
    assert ind.entries == ((Fraction(1),),)


@given(rows=matrices(max_rows=4, max_cols=4))
@settings(max_examples=60, deadline=None)
def test_induced_map_on_whole_spaces_is_the_matrix(rows):
    m = Matrix.from_rows(rows)
    src = Subquotient.whole(m.cols)
    tgt = Subquotient.whole(m.rows)
    assert induced_map(m, src, tgt).entries == m.entries


def test_pairing_rank_symplectic_and_degenerate():
    g = Matrix.from_rows([[0, 1], [-1, 0]])
    assert pairing_rank(g) == (2, True)
    assert pairing_rank(Matrix.zeros(2, 2)) == (0, False)
    with pytest.raises(InvariantError):
        pairing_rank(Matrix.zeros(2, 3))


def test_matrix_json_round_trip():
    m = Matrix.from_rows([[Fraction(1, 2), 3], [0, Fraction(-7, 5)]])
    assert Matrix.from_json(m.to_json()) == m
