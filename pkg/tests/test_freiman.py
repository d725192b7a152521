import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from convstab.errors import BudgetError, InputError
from convstab.freiman import (
    FreimanMap, compress_pair, compress_support, dimension_bound, embed,
    embedded_sequences, is_freiman_homomorphism, is_freiman_isomorphism)
from convstab.sparse_seq import SparseSequence, SupportSet, convolve, norm, random_sparse

import oracles


# predicates

@pytest.mark.parametrize("p, q", [(1, 0), (3, -7), (-2, 5)])
def test_affine_maps_are_homomorphisms(p, q):
    A = [0, 1, 4, 9, 10]
    phi = {a: p * a + q for a in A}
    assert is_freiman_homomorphism(A, A, phi)
    assert is_freiman_isomorphism(A, A, phi)


def test_homomorphism_examples():
    assert is_freiman_homomorphism([0, 1, 100], [0, 1, 100], {0: 0, 1: 1, 100: 3})
    # 0 + 2 == 1 + 1 but 0 + 3 != 1 + 1
    assert not is_freiman_homomorphism([0, 1, 2], [0, 1, 2], {0: 0, 1: 1, 2: 3})


def test_isomorphism_examples():
    A = [0, 3, 8]
    assert is_freiman_isomorphism(A, A, {a: a for a in A})
    assert is_freiman_isomorphism([0, 1, 100], [0, 1, 100], {0: 0, 1: 1, 100: 3})
    # the image gains 0 + 2 == 1 + 1
    phi = {0: 0, 1: 1, 3: 2}
    assert is_freiman_homomorphism([0, 1, 3], [0, 1, 3], phi)
    assert not is_freiman_isomorphism([0, 1, 3], [0, 1, 3], phi)


def test_predicates_need_full_map():
    with pytest.raises(InputError):
        is_freiman_homomorphism([0, 1], [0, 2], {0: 0, 1: 1})


def test_predicates_match_quadruple_oracle(rng):
    for _ in range(300):
        A1 = sorted(set(rng.integers(0, 8, size=rng.integers(1, 5)).tolist()))
        A2 = sorted(set(rng.integers(0, 8, size=rng.integers(1, 5)).tolist()))
        dom = sorted(set(A1) | set(A2))
        phi = dict(zip(dom, rng.integers(0, 10, size=len(dom)).tolist()))
        assert is_freiman_homomorphism(A1, A2, phi) == oracles.quadruple_homomorphism(A1, A2, phi)
        assert is_freiman_isomorphism(A1, A2, phi) == oracles.quadruple_isomorphism(A1, A2, phi)


def test_freiman_map_rejects_non_injective():
    with pytest.raises(InputError):
        FreimanMap(SupportSet([0, 1]), (0, 0))
    with pytest.raises(InputError):
        FreimanMap(SupportSet([0, 1]), (0,))


# dimension bound

@pytest.mark.parametrize("s, f, n", [(2, 2, 17), (2, 3, 730), (3, 2, 730), (3, 3, 65537)])
def test_dimension_bound(s, f, n):
    assert dimension_bound(s, f) == n


def test_dimension_bound_matches_float_formula():
    for s in range(2, 6):
        for f in range(2, 6):
            m = s + f - 2
            exact = dimension_bound(s, f)
            approx = 2.0 ** (2 * m * np.log2(m)) + 1
            assert exact == pytest.approx(approx, rel=1e-12)


@pytest.mark.parametrize("s, f", [(1, 3), (3, 0), (2.0, 2)])
def test_dimension_bound_rejects(s, f):
    with pytest.raises(InputError):
        dimension_bound(s, f)


# compression

def test_compress_examples():
    r = compress_support([0, 1], [0, 1])
    assert r.map.image == (0, 1) and r.diameter == 1
    r = compress_support([0, 1, 100], [0, 1])
    assert r.map.image == (0, 1, 3) and r.diameter == 3
    assert r.to_json() == {"image": [0, 1, 3], "diameter": 3, "bound_n": 730,
                           "within_bound": True}
    r = compress_support([0, 10 ** 6], [0, 10 ** 6])
    assert r.map.image == (0, 1) and r.diameter == 1


def test_compress_requires_zero():
    with pytest.raises(InputError):
        compress_support([1, 2], [0, 3])


def test_compress_budget():
    with pytest.raises(BudgetError):
        compress_support(range(13), [0])
    with pytest.raises(BudgetError):
        compress_support([0, 5, 17, 40, 91], [0], node_budget=10)


def test_compress_arithmetic_progression_is_tight():
    r = compress_support([0, 7, 14, 21], [0, 35])
    assert r.diameter == 5


def random_pair(rng, max_a=5, window=10 ** 6):
    while True:
        s, f = rng.integers(2, 5, size=2)
        I = [0] + rng.integers(1, window, size=s - 1).tolist()
        J = [0] + rng.integers(1, window, size=f - 1).tolist()
        if len(set(I)) == s and len(set(J)) == f and len(set(I) | set(J)) <= max_a:
            return sorted(I), sorted(J)


def structured_pair(rng, max_a=5):
    """Supports from a small window so that additive relations are common."""
    while True:
        s, f = rng.integers(2, 5, size=2)
        I = sorted({0, *rng.integers(1, 12, size=s - 1).tolist()})
        J = sorted({0, *rng.integers(1, 12, size=f - 1).tolist()})
        if len(set(I) | set(J)) <= max_a:
            return I, J


def test_compress_matches_exhaustive_oracle(rng):
    for k in range(40):
        I, J = (random_pair if k % 2 else structured_pair)(rng)
        A = sorted(set(I) | set(J))
        D, image = oracles.exhaustive_min_diameter(A)
        r = compress_support(I, J)
        assert r.diameter == D
        assert r.map.image == image


def test_compress_self_certifies_and_preserves_norm(rng):
    for _ in range(60):
        I, J = random_pair(rng, max_a=6)
        r = compress_support(I, J)
        A = r.map.domain.elements
        assert oracles.quadruple_isomorphism(A, A, r.map.as_dict())
        assert min(r.map.image) == 0
        assert r.within_bound and r.diameter <= dimension_bound(len(I), len(J)) - 1
        for _ in range(3):
            x = SparseSequence(I, (rng.standard_normal(len(I)) + 1j * rng.standard_normal(len(I))).tolist())
            y = SparseSequence(J, (rng.standard_normal(len(J)) + 1j * rng.standard_normal(len(J))).tolist())
            xt, yt = embedded_sequences(x, y, r.map)
            assert norm(xt) == norm(x) and norm(yt) == norm(y)
            assert norm(convolve(xt, yt)) == pytest.approx(norm(convolve(x, y)), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 60), min_size=1, max_size=4, unique=True),
       st.integers(1, 5).flatmap(lambda p: st.sampled_from([p, -p])),
       st.integers(-100, 100))
def test_affine_invariance(rest, p, q):
    A = [0] + [a for a in rest if a != 0]
    base = compress_support(A, [0]).diameter
    B = sorted(p * a + q for a in A)
    B = [b - B[0] for b in B]
    assert compress_support(B, [0]).diameter == base


def test_lex_least_tie_break():
    # (0, 1, 3) and (0, 2, 3) are both optimal; the lexicographically least wins
    r = compress_support([0, 50, 51], [0])
    assert r.diameter == 3
    assert r.map.image == (0, 1, 3)
    assert oracles.exhaustive_min_diameter([0, 50, 51]) == (3, (0, 1, 3))


# embedding

def test_embed_identity_is_zero_padding(rng):
    x = SparseSequence.from_dense(rng.standard_normal(4))
    y = SparseSequence.from_dense(rng.standard_normal(3))
    fmap = FreimanMap(SupportSet(range(5)), tuple(range(5)))
    xt, yt = embed(x, y, fmap)
    np.testing.assert_array_equal(xt, x.to_dense(5))
    np.testing.assert_array_equal(yt, y.to_dense(5))


def test_embed_placement():
    x = SparseSequence.from_dict({0: 1, 100: 1})
    xt, _ = embed(x, SparseSequence.delta(0), FreimanMap(SupportSet([0, 100]), (0, 1)))
    np.testing.assert_array_equal(xt, [1, 1])


def test_embed_outside_domain():
    with pytest.raises(InputError):
        embed(SparseSequence.delta(7), SparseSequence.delta(0),
              FreimanMap(SupportSet([0, 1]), (0, 1)))


def test_compress_pair_shifts(rng):
    x = random_sparse(rng, 3)
    y = random_sparse(rng, 3)
    r, xt, yt = compress_pair(x, y)
    xs, ys = SparseSequence.from_dense(xt), SparseSequence.from_dense(yt)
    assert norm(convolve(xs, ys)) == pytest.approx(norm(convolve(x, y)), rel=1e-12)
    assert len(xt) == r.diameter + 1
