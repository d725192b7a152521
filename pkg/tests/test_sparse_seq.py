import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from convstab.errors import IndexOverflowError, InputError
from convstab.sparse_seq import (
    INT64_MAX, SparseSequence, SupportSet, canonicalize_shift, circular_convolve,
    convolve, from_json, norm, random_sparse, to_json)

import oracles


def seq(d):
    return SparseSequence.from_dict(d)


# construction

def test_construction_sorts_merges_and_drops_zeros():
    x = SparseSequence([5, 1, 5, 3], [1, 2, -1, 0])
    assert x.support == (1,)
    assert x.values == (2,)


def test_construction_rejects_mismatch_and_nonfinite():
    with pytest.raises(InputError):
        SparseSequence([0, 1], [1])
    with pytest.raises(InputError):
        SparseSequence([0], [float("nan")])
    with pytest.raises(InputError):
        SparseSequence([0], [complex(1, float("inf"))])
    with pytest.raises(InputError):
        SparseSequence([0.5], [1])


def test_immutable():
    x = seq({0: 1})
    with pytest.raises(AttributeError):
        x.support = (1,)


def test_support_set_overflow():
    SupportSet([0, 2 ** 62 - 1])
    with pytest.raises(IndexOverflowError):
        SupportSet([0, 2 ** 62 + 1])
    assert SupportSet([3, 1, 3]).elements == (1, 3)
    assert SupportSet([-4, 7]).diameter == 11


# convolve

def test_convolve_identity(rng):
    y = random_sparse(rng, 5)
    assert convolve(SparseSequence.delta(0), y) == y


def test_convolve_cancellation():
    out = convolve(seq({0: 1, 1: 1}), seq({0: 1, 1: -1}))
    assert out == seq({0: 1, 2: -1})
    assert 1 not in out.support


def test_convolve_sumset():
    out = convolve(seq({0: 1, 5: 1}), seq({0: 1, 7: 1}))
    assert out == seq({0: 1, 5: 1, 7: 1, 12: 1})


def test_convolve_matches_direct_sum(rng):
    for _ in range(50):
        x = random_sparse(rng, rng.integers(1, 6), window=20)
        y = random_sparse(rng, rng.integers(1, 6), window=20)
        expected = oracles.direct_convolution(x.to_dict(), y.to_dict())
        got = convolve(x, y).to_dict()
        assert set(got) <= set(expected)
        for k, v in expected.items():
            assert abs(got.get(k, 0) - v) <= 1e-15


def test_convolve_support_size_bound(rng):
    x = random_sparse(rng, 4, window=5)
    y = random_sparse(rng, 3, window=5)
    assert len(convolve(x, y)) <= 12


def test_convolve_overflow():
    x = seq({INT64_MAX - 1: 1})
    with pytest.raises(IndexOverflowError):
        convolve(x, seq({5: 1}))


def test_convolve_empty():
    assert not convolve(SparseSequence(), seq({0: 1}))


# norm

@pytest.mark.parametrize("d, expected", [
    ({}, 0.0),
    ({0: 3, 4: 4}, 5.0),
    ({0: 1 / math.sqrt(2), 1: 1 / math.sqrt(2)}, 1.0),
])
def test_norm(d, expected):
    assert norm(seq(d)) == pytest.approx(expected, abs=1e-15)


# canonicalize_shift

@pytest.mark.parametrize("d, expected", [
    ({5: 1, 9: 2}, {0: 1, 4: 2}),
    ({0: 1}, {0: 1}),
    ({-3: 1j, 3: 1}, {0: 1j, 6: 1}),
])
def test_canonicalize_shift(d, expected):
    assert canonicalize_shift(seq(d)) == seq(expected)


def test_canonicalize_shift_empty():
    with pytest.raises(InputError):
        canonicalize_shift(SparseSequence())


# circular_convolve

def test_circular_identity_and_shift():
    y = np.array([2, 3 + 1j, -1])
    np.testing.assert_allclose(circular_convolve([1, 0, 0], y), y)
    np.testing.assert_allclose(circular_convolve([0, 1, 0], y), [y[2], y[0], y[1]])


def test_circular_matches_reduced_linear(rng):
    for n in range(1, 7):
        m = 2 * n - 1
        x = np.zeros(m, complex)
        y = np.zeros(m, complex)
        x[:n] = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        y[:n] = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        got = circular_convolve(x, y)
        np.testing.assert_allclose(got, oracles.circular_by_reduction(x, y), atol=1e-14)
        # zero padding to 2n-1 makes the wrap-around vacuous
        lin = convolve(SparseSequence.from_dense(x[:n]), SparseSequence.from_dense(y[:n]))
        np.testing.assert_allclose(got, lin.to_dense(m), atol=1e-14)


def test_circular_length_mismatch():
    with pytest.raises(InputError):
        circular_convolve([1, 2], [1, 2, 3])


# json

def test_json_round_trip(rng):
    x = random_sparse(rng, 4)
    assert from_json(to_json(x)) == x


@pytest.mark.parametrize("bad", [
    {"support": [0], "values": [1.0]},
    {"support": [0], "values": [[1.0, "a"]]},
    {"support": "0", "values": []},
    {"support": [0]},
    {"support": [0], "values": [[1, 0]], "extra": 1},
])
def test_json_rejects(bad):
    with pytest.raises(InputError):
        from_json(bad)


# properties

supports = st.lists(st.integers(-10 ** 6, 10 ** 6), min_size=1, max_size=6, unique=True)
seeds = st.integers(0, 2 ** 32 - 1)


def make(support, seed):
    r = np.random.default_rng(seed)
    vals = r.standard_normal(len(support)) + 1j * r.standard_normal(len(support))
    return SparseSequence(support, vals.tolist())


@settings(max_examples=200, deadline=None)
@given(supports, supports, seeds)
def test_commutativity(sx, sy, seed):
    x, y = make(sx, seed), make(sy, seed + 1)
    a, b = convolve(x, y), convolve(y, x)
    assert a.support == b.support
    assert max(abs(p - q) for p, q in zip(a.values, b.values)) <= 1e-15


@settings(max_examples=200, deadline=None)
@given(supports, supports, seeds, st.integers(-10 ** 9, 10 ** 9))
def test_shift_invariance(sx, sy, seed, a):
    x, y = make(sx, seed), make(sy, seed + 1)
    base = norm(convolve(x, y))
    assert norm(convolve(x.shift(a), y)) == pytest.approx(base, rel=1e-12)


@settings(max_examples=300, deadline=None)
@given(supports, supports, seeds)
def test_young_upper_bound(sx, sy, seed):
    x, y = make(sx, seed), make(sy, seed + 1)
    bound = math.sqrt(min(len(x), len(y))) * norm(x) * norm(y)
    assert norm(convolve(x, y)) <= bound + 1e-12 * max(1.0, bound)


@settings(max_examples=200, deadline=None)
@given(st.integers(-10 ** 6, 10 ** 6), supports, seeds)
def test_singleton_equality(i, sy, seed):
    r = np.random.default_rng(seed)
    x = SparseSequence([i], [complex(r.standard_normal(), r.standard_normal())])
    y = make(sy, seed + 1)
    assert norm(convolve(x, y)) == pytest.approx(norm(x) * norm(y), rel=1e-12)


def test_nonzero_on_generic_supports(rng):
    for _ in range(200):
        x = random_sparse(rng, rng.integers(1, 7))
        y = random_sparse(rng, rng.integers(1, 7))
        assert norm(convolve(x, y)) > 0
