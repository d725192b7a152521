"""
Freiman homomorphisms and isomorphisms of order 2, and support compression.

A map ``phi`` on ``A1 u A2`` is a Freiman homomorphism on ``(A1, A2)`` if
``i + j == i' + j'`` implies ``phi(i) + phi(j) == phi(i') + phi(j')`` for all
``i, i'`` in A1 and ``j, j'`` in A2, and an isomorphism if the implication
holds in both directions. Isomorphic supports produce the same convolution
combinatorics, which is what :func:`compress_support` exploits: it finds an
isomorphic copy of ``A = I u J`` of least possible diameter.
"""

import math
from collections import defaultdict
from itertools import combinations
from dataclasses import dataclass

import numpy as np

from convstab.errors import BudgetError, InputError
from convstab.sparse_seq import SparseSequence, SupportSet

MAX_COMPRESS_ELEMENTS = 12
DEFAULT_NODE_BUDGET = 10_000_000


@dataclass(frozen=True)
class FreimanMap:
    """Injective integer map on a finite domain, stored position-aligned.

    ``image[k]`` is the value of the map at ``domain.elements[k]``.
    """

    domain: SupportSet
    image: tuple

    def __post_init__(self):
        dom = self.domain if isinstance(self.domain, SupportSet) else SupportSet(self.domain)
        img = tuple(int(v) for v in self.image)
        if len(img) != len(dom):
            raise InputError(f"image has {len(img)} entries for a domain of {len(dom)}")
        if len(set(img)) != len(img):
            raise InputError("Freiman map must be injective")
        object.__setattr__(self, "domain", dom)
        object.__setattr__(self, "image", img)

    def as_dict(self):
        return dict(zip(self.domain.elements, self.image))

    def __call__(self, a):
        try:
            return self.as_dict()[a]
        except KeyError:
            raise InputError(f"{a} is not in the map domain") from None

    @property
    def diameter(self):
        return max(self.image) - min(self.image) if self.image else 0

    def translated(self, c):
        return FreimanMap(self.domain, tuple(v + c for v in self.image))


@dataclass(frozen=True)
class CompressionResult:
    map: FreimanMap
    diameter: int
    bound_n: int
    within_bound: bool
    nodes: int = 0

    def to_json(self):
        return {"image": list(self.map.image), "diameter": self.diameter,
                "bound_n": self.bound_n, "within_bound": self.within_bound}


def _lookup(phi, A1, A2):
    table = phi.as_dict() if isinstance(phi, FreimanMap) else dict(phi)
    missing = [a for a in set(A1) | set(A2) if a not in table]
    if missing:
        raise InputError(f"map is undefined on {sorted(missing)}")
    return table


def _sum_classes(A1, A2, table):
    """Group pairs by domain sum; collect the image sums of each group."""
    classes = defaultdict(set)
    for i in A1:
        for j in A2:
            classes[i + j].add(table[i] + table[j])
    return classes


def is_freiman_homomorphism(A1, A2, phi):
    """True iff equal domain sums always give equal image sums."""
    table = _lookup(phi, A1, A2)
    return all(len(ts) == 1 for ts in _sum_classes(A1, A2, table).values())


def is_freiman_isomorphism(A1, A2, phi):
    """True iff domain sums and image sums coincide exactly together."""
    table = _lookup(phi, A1, A2)
    classes = _sum_classes(A1, A2, table)
    if any(len(ts) != 1 for ts in classes.values()):
        return False
    images = [next(iter(ts)) for ts in classes.values()]
    return len(set(images)) == len(images)


def dimension_bound(s, f):
    """``floor(2^(2(s+f-2) log2(s+f-2))) + 1``, computed exactly.

    With ``m = s + f - 2`` the power equals ``m^(2m)``, an integer.
    """
    for name, v in (("s", s), ("f", f)):
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise InputError(f"{name} must be an integer")
        if v < 2:
            raise InputError(f"{name}={v}: the dimension bound needs sparsities >= 2")
    m = int(s) + int(f) - 2
    return m ** (2 * m) + 1


def _sum_profile(elems):
    """Sorted representation counts of the sums a + b (a <= b): an isomorphism invariant."""
    counts = defaultdict(int)
    for k, a in enumerate(elems):
        for b in elems[k:]:
            counts[a + b] += 1
    return tuple(sorted(counts.values()))


def _element_signatures(elems):
    """Per element x: sorted representation counts of x + y over y in the set."""
    counts = defaultdict(int)
    for k, a in enumerate(elems):
        for b in elems[k:]:
            counts[a + b] += 1
    return {x: tuple(sorted(counts[x + y] for y in elems)) for x in elems}


class _Search:
    """Least-diameter Freiman isomorphism of (A, A) into [0, D], D increasing.

    For each D the candidate image sets S (containing 0 and D) are enumerated
    in increasing order. A partial set is pruned unless its sum profile
    matches some subset of A of the same size, since an isomorphism restricts
    to an isomorphism on subsets. Each surviving S is then matched against A
    by a depth-first search over bijections in domain order.
    """

    def __init__(self, elements, node_budget):
        self.a = elements
        self.m = len(elements)
        self.node_budget = node_budget
        self.nodes = 0
        self.signatures = _element_signatures(elements)
        self.profiles = defaultdict(set)
        for k in range(1, self.m + 1):
            for sub in combinations(elements, k):
                self.profiles[k].add(_sum_profile(sub))

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise BudgetError(f"compression search exceeded {self.node_budget} nodes")

    def run(self):
        m = self.m
        if m == 1:
            return (0,)
        sums = {x + y for x in self.a for y in self.a}
        # the image sum set has |A+A| elements inside [0, 2D]
        D = max(m - 1, math.ceil((len(sums) - 1) / 2))
        while True:
            best = None
            for S in self._image_sets(D):
                phi = self._match(S)
                if phi is not None and (best is None or phi < best):
                    best = phi
            if best is not None:
                return best
            D += 1

    def _image_sets(self, D):
        m = self.m
        T = [0]

        def extend():
            k = len(T)
            if k == m:
                yield tuple(T)
                return
            if k == m - 1:
                candidates = (D,)
            else:
                candidates = range(T[-1] + 1, D - (m - 1 - k) + 1)
            for c in candidates:
                if c == D and k < m - 1:
                    break
                self._tick()
                T.append(c)
                if _sum_profile(T) in self.profiles[k + 1]:
                    yield from extend()
                T.pop()

        yield from extend()

    def _match(self, S):
        """Lexicographically least isomorphic bijection A -> S, or None."""
        m = self.m
        sig_S = _element_signatures(S)
        options = [[p for p in S if sig_S[p] == self.signatures[a]] for a in self.a]
        if any(not opts for opts in options):
            return None
        phi = [None] * m
        used = set()
        dom2img = {}
        img2dom = {}

        def assign(k, p):
            added = []
            for l in range(k + 1):
                s = self.a[k] + self.a[l]
                t = p + (p if l == k else phi[l])
                prev = dom2img.get(s)
                if prev is None and t not in img2dom:
                    dom2img[s] = t
                    img2dom[t] = s
                    added.append(s)
                elif prev != t:
                    for s2 in added:
                        del img2dom[dom2img.pop(s2)]
                    return None
            return added

        def dfs(k):
            if k == m:
                return tuple(phi)
            for p in options[k]:
                if p in used:
                    continue
                self._tick()
                added = assign(k, p)
                if added is None:
                    continue
                phi[k] = p
                used.add(p)
                res = dfs(k + 1)
                if res is not None:
                    return res
                used.discard(p)
                phi[k] = None
                for s2 in added:
                    del img2dom[dom2img.pop(s2)]
            return None

        return dfs(0)


def compress_support(I, J, node_budget=DEFAULT_NODE_BUDGET):
    """Least-diameter Freiman isomorphism of ``A = I u J`` into the integers.

    Parameters
    ----------
    I, J : iterable of int
        Supports containing 0 (apply :func:`canonicalize_shift` first).
    node_budget : int
        Cap on search nodes.

    Returns
    -------
    CompressionResult
        The map is the lexicographically least image (aligned with sorted A)
        among all isomorphisms of minimal diameter, translated so that its
        minimum is 0.

    Raises
    ------
    BudgetError
        If ``|A| > 12`` or the search exceeds `node_budget` nodes.
    """
    I = I if isinstance(I, SupportSet) else SupportSet(I)
    J = J if isinstance(J, SupportSet) else SupportSet(J)
    if 0 not in I or 0 not in J:
        raise InputError("both supports must contain 0; canonicalize the shift first")
    A = I.union(J)
    if len(A) > MAX_COMPRESS_ELEMENTS:
        raise BudgetError(f"|I u J| = {len(A)} exceeds the search budget of {MAX_COMPRESS_ELEMENTS}")
    search = _Search(A.elements, node_budget)
    image = search.run()
    fmap = FreimanMap(A, image)
    fmap = fmap.translated(-min(fmap.image))
    if not is_freiman_isomorphism(A, A, fmap):
        raise RuntimeError(f"compression produced a non-isomorphism {fmap}")
    bound_n = dimension_bound(max(len(I), 2), max(len(J), 2))
    D = fmap.diameter
    return CompressionResult(fmap, D, bound_n, D <= bound_n - 1, nodes=search.nodes)


def embed(x, y, fmap):
    """Place `x` and `y` on the compressed index range ``[0, diameter]``.

    Returns dense vectors ``(x_tilde, y_tilde)`` of length ``diameter + 1``
    (the map is assumed translated to minimum 0).
    """
    table = fmap.as_dict()
    outside = [i for i in set(x.support) | set(y.support) if i not in table]
    if outside:
        raise InputError(f"support elements {sorted(outside)} are outside the map domain")
    lo = min(fmap.image)
    length = max(fmap.image) - lo + 1
    out = []
    for seq in (x, y):
        vec = np.zeros(length, dtype=complex)
        for i, z in zip(seq.support, seq.values):
            vec[table[i] - lo] = z
        out.append(vec)
    return out[0], out[1]


def compress_pair(x, y, node_budget=DEFAULT_NODE_BUDGET):
    """Shift both sequences to start at 0, compress the joint support and embed.

    Returns ``(result, x_tilde, y_tilde)``.
    """
    if not x or not y:
        raise InputError("both sequences must be nonzero")
    x0 = x.shift(-x.support[0])
    y0 = y.shift(-y.support[0])
    result = compress_support(x0.support, y0.support, node_budget=node_budget)
    xt, yt = embed(x0, y0, result.map)
    return result, xt, yt


def embedded_sequences(x, y, fmap):
    """Like :func:`embed` but returns SparseSequences on ``[0, diameter]``."""
    xt, yt = embed(x, y, fmap)
    return SparseSequence.from_dense(xt), SparseSequence.from_dense(yt)
