"""
Finitely supported complex sequences on the integers.

A :class:`SparseSequence` stores a strictly increasing support list and the
matching nonzero complex values. Convolution is evaluated exactly on the
index level (the sum set of the supports) with floating point arithmetic on
the values.
"""

import math
from collections import defaultdict

import numpy as np

from convstab.errors import IndexOverflowError, InputError

INT64_MIN = -(2 ** 63)
INT64_MAX = 2 ** 63 - 1


def _check_index(i):
    if isinstance(i, bool) or not isinstance(i, (int, np.integer)):
        raise InputError(f"support entries must be integers, got {i!r}")
    i = int(i)
    if not INT64_MIN <= i <= INT64_MAX:
        raise IndexOverflowError(f"index {i} outside the signed 64-bit range")
    return i


def _check_sum_range(lo, hi):
    if lo < INT64_MIN or hi > INT64_MAX:
        raise IndexOverflowError(
            f"index sums span [{lo}, {hi}], outside the signed 64-bit range")


def _as_complex(v):
    if isinstance(v, bool):
        raise InputError(f"values must be numeric, got {v!r}")
    try:
        z = complex(v)
    except (TypeError, ValueError):
        raise InputError(f"values must be numeric, got {v!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError("values must be finite (NaN/Inf rejected)")
    return z


class SupportSet:
    """Sorted, duplicate-free finite set of integers.

    Pairwise sums of the elements must stay inside the signed 64-bit range,
    so that sum-set computations never overflow.
    """

    __slots__ = ("elements",)

    def __init__(self, elements=()):
        elems = sorted({_check_index(e) for e in elements})
        if elems:
            _check_sum_range(2 * elems[0], 2 * elems[-1])
        object.__setattr__(self, "elements", tuple(elems))

    def __setattr__(self, name, value):
        raise AttributeError("SupportSet is immutable")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, item):
        return item in self.elements

    def __eq__(self, other):
        if isinstance(other, SupportSet):
            return self.elements == other.elements
        return NotImplemented

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        return f"SupportSet({list(self.elements)})"

    @property
    def diameter(self):
        """max - min, or 0 for the empty set."""
        if not self.elements:
            return 0
        return self.elements[-1] - self.elements[0]

    def shifted(self, a):
        return SupportSet(e + a for e in self.elements)

    def union(self, other):
        return SupportSet(self.elements + tuple(other))


class SparseSequence:
    """Immutable finitely supported sequence ``x: Z -> C``.

    Parameters
    ----------
    support : iterable of int
        Indices; need not be sorted. Repeated indices are merged by adding
        their values.
    values : iterable of complex
        Values aligned with `support`.

    Entries whose (merged) value is exactly zero are dropped, so ``support``
    is always the true support of the sequence.
    """

    __slots__ = ("support", "values")

    def __init__(self, support=(), values=()):
        support = list(support)
        values = list(values)
        if len(support) != len(values):
            raise InputError(
                f"support has {len(support)} entries but values has {len(values)}")
        acc = {}
        for i, v in zip(support, values):
            i = _check_index(i)
            z = _as_complex(v)
            acc[i] = acc[i] + z if i in acc else z
        items = sorted((i, z) for i, z in acc.items() if z != 0)
        object.__setattr__(self, "support", tuple(i for i, _ in items))
        object.__setattr__(self, "values", tuple(z for _, z in items))

    def __setattr__(self, name, value):
        raise AttributeError("SparseSequence is immutable")

    @classmethod
    def from_dict(cls, mapping):
        """Build from ``{index: value}``."""
        return cls(list(mapping.keys()), list(mapping.values()))

    @classmethod
    def from_dense(cls, vec, offset=0):
        """Read a dense vector as a sequence supported on ``offset + [0, len)``."""
        vec = np.asarray(vec, dtype=complex).ravel()
        return cls(range(offset, offset + len(vec)), vec.tolist())

    @classmethod
    def delta(cls, index=0, value=1.0):
        return cls([index], [value])

    def to_dict(self):
        return dict(zip(self.support, self.values))

    def to_dense(self, length=None):
        """Dense vector indexed from 0; requires a nonnegative support."""
        if self.support and self.support[0] < 0:
            raise InputError("to_dense needs a nonnegative support; shift first")
        need = self.support[-1] + 1 if self.support else 0
        if length is None:
            length = need
        if length < need:
            raise InputError(f"length {length} too short for support up to {need - 1}")
        out = np.zeros(length, dtype=complex)
        for i, z in zip(self.support, self.values):
            out[i] = z
        return out

    def __len__(self):
        return len(self.support)

    def __bool__(self):
        return bool(self.support)

    def __eq__(self, other):
        if isinstance(other, SparseSequence):
            return self.support == other.support and self.values == other.values
        return NotImplemented

    def __hash__(self):
        return hash((self.support, self.values))

    def __repr__(self):
        body = ", ".join(f"{i}: {z!r}" for i, z in zip(self.support, self.values))
        return f"SparseSequence({{{body}}})"

    def __mul__(self, c):
        c = _as_complex(c)
        return SparseSequence(self.support, [c * z for z in self.values])

    __rmul__ = __mul__

    @property
    def support_set(self):
        return SupportSet(self.support)

    def coefficients(self):
        return np.array(self.values, dtype=complex)

    def shift(self, a):
        """Translate the support by the integer `a`."""
        a = _check_index(a)
        if self.support:
            _check_sum_range(self.support[0] + a, self.support[-1] + a)
        return SparseSequence([i + a for i in self.support], self.values)

    def normalized(self):
        nrm = norm(self)
        if nrm == 0:
            raise InputError("cannot normalize the zero sequence")
        return SparseSequence(self.support, [z / nrm for z in self.values])


def convolve(x, y):
    """Exact-index convolution ``(x * y)_j = sum_i x_i y_{j-i}``.

    Raises
    ------
    IndexOverflowError
        If some index sum leaves the signed 64-bit range.
    """
    if not x or not y:
        return SparseSequence()
    _check_sum_range(x.support[0] + y.support[0], x.support[-1] + y.support[-1])
    acc = defaultdict(complex)
    for i, xi in zip(x.support, x.values):
        for j, yj in zip(y.support, y.values):
            acc[i + j] += xi * yj
    return SparseSequence(list(acc.keys()), list(acc.values()))


def norm(x):
    """Euclidean norm of the value list."""
    if not x:
        return 0.0
    return float(np.linalg.norm(x.coefficients()))


def canonicalize_shift(x):
    """Translate `x` so that the smallest support index is 0."""
    if not x:
        raise InputError("cannot canonicalize the shift of an empty sequence")
    return x.shift(-x.support[0])


def circular_convolve(x, y):
    """Cyclic convolution of two dense vectors of equal length m.

    Index arithmetic is taken modulo m, i.e. the convolution on Z/mZ.
    """
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    m = len(x)
    if m < 1 or len(y) != m:
        raise InputError(f"need equal nonzero lengths, got {len(x)} and {len(y)}")
    out = np.zeros(m, dtype=complex)
    for i in range(m):
        if x[i] != 0:
            out += x[i] * np.roll(y, i)
    return out


def random_sparse(rng, k, window=10 ** 6, normalize=True):
    """Random k-sparse sequence with support drawn uniformly from [-window, window].

    Values are complex Gaussian; with `normalize` the result has unit norm.
    """
    if k < 1:
        raise InputError("sparsity must be at least 1")
    if 2 * window + 1 < k:
        raise InputError(f"window {window} too small for {k} distinct indices")
    support = set()
    while len(support) < k:
        support.update(int(i) for i in rng.integers(-window, window + 1, size=k - len(support)))
    support = sorted(support)
    vals = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    if normalize:
        vals = vals / np.linalg.norm(vals)
    return SparseSequence(support, vals.tolist())


def to_json(x):
    """JSON-ready dict ``{"support": [...], "values": [[re, im], ...]}``."""
    return {"support": list(x.support),
            "values": [[z.real, z.imag] for z in x.values]}


def from_json(obj):
    """Inverse of :func:`to_json`; rejects NaN/Inf and ill-typed fields."""
    if not isinstance(obj, dict) or set(obj) - {"support", "values"} \
            or "support" not in obj or "values" not in obj:
        raise InputError('expected an object with keys "support" and "values"')
    support, values = obj["support"], obj["values"]
    if not isinstance(support, list) or not isinstance(values, list):
        raise InputError('"support" and "values" must be arrays')
    vals = []
    for v in values:
        if not (isinstance(v, list) and len(v) == 2
                and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in v)):
            raise InputError(f"each value must be a [re, im] pair of numbers, got {v!r}")
        vals.append(complex(float(v[0]), float(v[1])))
    return SparseSequence(support, vals)
