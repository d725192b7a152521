"""
Upper and lower bounds on the stability constant of sparse convolutions.

For sparsities ``s`` and ``f`` the stability constant is

    alpha(s, f) = inf ||x * y||   over unit x with |supp x| <= s,
                                  unit y with |supp y| <= f,

and ``beta(s, f) = sqrt(min(s, f))`` bounds ``||x * y||`` from above.

With supports restricted to ``[0, n_eff - 1]``, ``||x * y||^2`` is the
quadratic form of the Toeplitz matrix ``B_y`` restricted to ``supp x``.
:func:`alpha_upper_alternating` minimizes it by alternating exact
eigenvalue steps in ``x`` and ``y``. Any value it returns is attained by its
witness pair, hence an upper bound on ``alpha(s, f)``; as ``n_eff`` grows
these bounds decrease to ``alpha(s, f)``.

:func:`alpha_lower_detbound` evaluates the determinant chain

    min_a lambda(B_a) >= sqrt(2) (2n)^(-n/2) min_a |det B_a|

with a numerical estimate of the determinant minimum.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.optimize

from convstab import _parallel
from convstab.autocorr_toeplitz import (
    AutocorrToeplitz, abs_det, autocorrelation, det_eigen_lower_bound,
    smallest_eigenvalue, smallest_eigenvalues, toeplitz_from_autocorr)
from convstab.errors import BudgetError, InputError
from convstab.sparse_seq import SparseSequence, convolve, norm
from convstab.sparse_seq import to_json as seq_json

MAX_N_EFF = 16
MAX_N_DET = 6
MAX_TABLE = 4
MAX_SUPPORTS = 10 ** 5
UPPER_TOL = 1e-12


def _check_sparsity(name, v, lo=1):
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
        raise InputError(f"{name} must be an integer, got {v!r}")
    if v < lo:
        raise InputError(f"{name} must be >= {lo}, got {v}")
    return int(v)


def beta(s, f):
    """Upper stability constant ``sqrt(min(s, f))``."""
    s = _check_sparsity("s", s)
    f = _check_sparsity("f", f)
    return math.sqrt(min(s, f))


@dataclass
class StabilityReport:
    """Bounds on alpha(s, f) together with the data that certifies them."""

    s: int
    f: int
    beta: float
    alpha_upper: float
    witness_x: SparseSequence
    witness_y: SparseSequence
    n_eff: int
    seed: int
    restarts: int
    iterations: int
    history: list = field(default_factory=list)
    alpha_lower: float = None
    lower: "LowerBoundEstimate" = None

    def to_json(self):
        out = {
            "s": self.s, "f": self.f, "beta": self.beta,
            "alpha_upper": self.alpha_upper,
            "witness": {"x": seq_json(self.witness_x), "y": seq_json(self.witness_y)},
            "alpha_lower": self.alpha_lower,
            "n_eff": self.n_eff, "seed": self.seed,
            "method": {"name": "alternating-eigen", "restarts": self.restarts,
                       "iterations": self.iterations},
        }
        if self.lower is not None:
            out["lower"] = self.lower.to_json()
        return out


def _supports_with_zero(n, k):
    """All k-subsets of [0, n-1] containing 0, lexicographic."""
    if math.comb(n - 1, k - 1) > MAX_SUPPORTS:
        raise BudgetError(f"C({n - 1}, {k - 1}) supports exceed {MAX_SUPPORTS}")
    return np.array([(0,) + c for c in combinations(range(1, n), k - 1)], dtype=np.intp)


def _min_over_supports(M, supports):
    """min over rows I of ``supports`` of lambda(M[I, I]), with minimizer and eigenvector."""
    stack = M[supports[:, :, None], supports[:, None, :]]
    lams, vecs = smallest_eigenvalues(stack)
    k = int(np.argmin(lams))
    return float(lams[k]), supports[k], vecs[k]


def _place(n, idx, vals):
    out = np.zeros(n, dtype=complex)
    out[idx] = vals
    return out


def _alternate(y, supports_x, supports_y, n, tol, max_rounds):
    """Alternating exact minimization from the starting vector y.

    With ``B_y`` as in :mod:`convstab.autocorr_toeplitz`, ``||x * y||^2`` is
    ``w^H B_y[I, I] w`` for ``w = conj(x_I)``; the minimizing x is the
    conjugated smallest eigenvector. The same holds with x and y exchanged.
    """
    history = []
    prev = math.inf
    x = None
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        lam_x, I, u = _min_over_supports(toeplitz_from_autocorr(autocorrelation(y)), supports_x)
        x = _place(n, I, np.conj(u))
        history.append(lam_x)
        lam_y, J, v = _min_over_supports(toeplitz_from_autocorr(autocorrelation(x)), supports_y)
        y = _place(n, J, np.conj(v))
        history.append(lam_y)
        if prev - lam_y <= tol * abs(lam_y):
            break
        prev = lam_y
    return history[-1], x, y, history, rounds


def _trivial_report(s, f, n_eff, restarts, seed):
    one = SparseSequence.delta(0)
    return StabilityReport(s, f, beta(s, f), 1.0, one, one, n_eff, seed, restarts,
                           iterations=0, history=[1.0])


def alpha_upper_alternating(s, f, n_eff, restarts=32, seed=0, tol=1e-10, max_rounds=500,
                            workers=None):
    """Upper bound on alpha(s, f) by alternating minimization over ``[0, n_eff - 1]``.

    Parameters
    ----------
    s, f : int
        Sparsities, ``1 <= s, f <= n_eff``.
    n_eff : int
        Ambient dimension of the restricted problem, at most 16.
    restarts : int
        Number of random initializations. Restart ``r`` draws from a
        generator seeded with ``(seed, r)``, so results do not depend on
        `workers`.
    tol : float
        Stop when a full round decreases the objective by less than
        ``tol`` relative.
    max_rounds : int
    workers : int, optional
        Thread count; defaults to ``CONVSTAB_THREADS``.

    Returns
    -------
    StabilityReport
        ``alpha_upper`` is the square root of the best objective; the witness
        pair attains it. ``alpha_lower`` is left unset.
    """
    s = _check_sparsity("s", s)
    f = _check_sparsity("f", f)
    n = _check_sparsity("n_eff", n_eff)
    restarts = _check_sparsity("restarts", restarts)
    if n > MAX_N_EFF:
        raise BudgetError(f"n_eff={n} exceeds the enumeration budget of {MAX_N_EFF}")
    if max(s, f) > n:
        raise InputError(f"sparsities ({s}, {f}) do not fit in n_eff={n}")
    if min(s, f) == 1:
        # a singleton factor only shifts and scales the other one
        return _trivial_report(s, f, n, restarts, seed)
    supports_x = _supports_with_zero(n, s)
    supports_y = _supports_with_zero(n, f)

    def one_restart(r):
        rng = np.random.default_rng([seed, r])
        J = supports_y[rng.integers(len(supports_y))]
        v = rng.standard_normal(f) + 1j * rng.standard_normal(f)
        y0 = _place(n, J, v / np.linalg.norm(v))
        return _alternate(y0, supports_x, supports_y, n, tol, max_rounds)

    results = _parallel.ordered_map(one_restart, range(restarts), workers)
    best = None
    for res in results:
        lam, x, y, history, rounds = res
        wx, wy = SparseSequence.from_dense(x), SparseSequence.from_dense(y)
        key = (lam, wx.support, wy.support)
        if best is None or key < best[0]:
            best = (key, wx, wy, history, rounds)
    (lam, _, _), wx, wy, history, rounds = best
    return StabilityReport(s, f, beta(s, f), math.sqrt(max(lam, 0.0)), wx, wy, n, seed,
                           restarts, iterations=rounds, history=list(history))


@dataclass
class LowerBoundEstimate:
    """Determinant-chain lower bound at dimension n.

    ``d_hat`` comes from multi-start local minimization, so it estimates
    ``min_a |det B_a|`` from above and the chain value is heuristic.
    ``per_instance_bound`` is rigorous for the matrix built from ``generator``.
    """

    n: int
    d_hat: float
    lambda_chain: float
    alpha_lower: float
    lambda_min_direct: float
    generator: np.ndarray
    per_instance_bound: float
    starts: int
    is_estimate: bool = True

    def to_json(self):
        return {"n": self.n, "d_hat": self.d_hat, "lambda_chain": self.lambda_chain,
                "alpha_lower": self.alpha_lower, "lambda_min_direct": self.lambda_min_direct,
                "per_instance_bound": self.per_instance_bound, "starts": self.starts,
                "is_estimate": self.is_estimate}


def _unit_from_real(z):
    n = z.size // 2
    a = z[:n] + 1j * z[n:]
    return a / np.linalg.norm(a)


def _multistart_min(objective, n, starts, rng):
    best_val, best_a = math.inf, None
    for _ in range(starts):
        z0 = rng.standard_normal(2 * n)

        def fun(z):
            nz = np.linalg.norm(z)
            if nz == 0:
                return math.inf
            return objective(_unit_from_real(z))

        res = scipy.optimize.minimize(fun, z0, method="BFGS", options={"gtol": 1e-10})
        # BFGS may stop at a kink; a simplex polish costs little at this size
        res = scipy.optimize.minimize(fun, res.x, method="Nelder-Mead",
                                      options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
        if res.fun < best_val:
            best_val, best_a = float(res.fun), _unit_from_real(res.x)
    return best_val, best_a


def chain_constant(n):
    """``sqrt(2) (2n)^(-n/2)``, the factor multiplying d_n in the chain."""
    return math.sqrt(2.0) * (2.0 * n) ** (-n / 2.0)


def alpha_lower_detbound(n_eff, d_estimate_budget=16, seed=0):
    """Heuristic lower bound on alpha at dimension ``n_eff`` via the determinant chain.

    Estimates ``d_n = min_{|a|=1} |det B_a|`` by ``d_estimate_budget`` local
    minimizations from random complex starts, and returns
    ``sqrt(2) (2n)^(-n/2) d_hat`` (a bound for the smallest eigenvalue, i.e.
    for alpha^2) plus its square root. The direct minimum of the smallest
    eigenvalue is estimated the same way for comparison.
    """
    n = _check_sparsity("n_eff", n_eff, lo=2)
    starts = _check_sparsity("d_estimate_budget", d_estimate_budget)
    if n > MAX_N_DET:
        raise BudgetError(f"n_eff={n} exceeds the determinant minimization budget of {MAX_N_DET}")
    if starts > 1000:
        raise BudgetError(f"{starts} starts exceed the budget of 1000")
    rng = np.random.default_rng([seed, n])
    d_hat, a_det = _multistart_min(
        lambda a: abs_det(toeplitz_from_autocorr(autocorrelation(a))), n, starts, rng)
    lam_direct, _ = _multistart_min(
        lambda a: smallest_eigenvalue(toeplitz_from_autocorr(autocorrelation(a)))[0],
        n, starts, rng)
    lam_chain = chain_constant(n) * d_hat
    per_instance = float(det_eigen_lower_bound(AutocorrToeplitz(autocorrelation(a_det), a_det)))
    return LowerBoundEstimate(n, d_hat, lam_chain, math.sqrt(lam_chain), lam_direct,
                              a_det, per_instance, starts)


def stability_report(s, f, n_eff, restarts=32, seed=0, d_estimate_budget=16, workers=None):
    """Alternating upper bound plus, for ``2 <= n_eff <= 6``, the determinant-chain lower bound."""
    report = alpha_upper_alternating(s, f, n_eff, restarts=restarts, seed=seed, workers=workers)
    if 2 <= report.n_eff <= MAX_N_DET:
        lower = alpha_lower_detbound(report.n_eff, d_estimate_budget, seed)
        report.lower = lower
        report.alpha_lower = lower.alpha_lower
    return report


@dataclass
class InequalityCheck:
    s: int
    f: int
    ratio: float
    beta: float
    upper_ok: bool
    alpha_reference: float = None
    below_reference: bool = False

    def to_json(self):
        return {"s": self.s, "f": self.f, "ratio": self.ratio, "beta": self.beta,
                "upper_ok": self.upper_ok, "alpha_reference": self.alpha_reference,
                "below_reference": self.below_reference}


def verify_inequality(x, y, alpha_reference=None):
    """Check ``||x * y|| <= beta ||x|| ||y||`` and compare against a known alpha bound.

    Parameters
    ----------
    x, y : SparseSequence
        Nonzero sequences.
    alpha_reference : float, optional
        Best known upper bound on alpha(|supp x|, |supp y|). A ratio below it
        is flagged in ``below_reference`` (an improvement, not an error).
        Defaults to 1 when one support is a singleton.
    """
    if not x or not y:
        raise InputError("verify_inequality needs nonzero sequences")
    s, f = len(x), len(y)
    ratio = norm(convolve(x, y)) / (norm(x) * norm(y))
    b = beta(s, f)
    if alpha_reference is None and min(s, f) == 1:
        alpha_reference = 1.0
    below = alpha_reference is not None and ratio < alpha_reference - UPPER_TOL
    return InequalityCheck(s, f, ratio, b, ratio <= b + UPPER_TOL, alpha_reference, below)


class PropertyViolation(AssertionError):
    """A checked mathematical property failed."""


def table_violations(table, tol=1e-8):
    """List monotonicity and symmetry violations of an alpha table (1-based labels)."""
    A = np.asarray(table, dtype=float)
    out = []
    rows, cols = A.shape
    for i in range(rows):
        for j in range(cols):
            if i + 1 < rows and A[i + 1, j] > A[i, j] + tol:
                out.append(f"A[{i + 2}][{j + 1}] > A[{i + 1}][{j + 1}]")
            if j + 1 < cols and A[i, j + 1] > A[i, j] + tol:
                out.append(f"A[{i + 1}][{j + 2}] > A[{i + 1}][{j + 1}]")
            if j < rows and i < cols and abs(A[i, j] - A[j, i]) > tol:
                if i < j:
                    out.append(f"A[{i + 1}][{j + 1}] != A[{j + 1}][{i + 1}]")
    return out


def monotonicity_table(s_max, f_max, n_eff, restarts=32, seed=0, check=True, workers=None):
    """Table ``A[s-1][f-1]`` of alternating upper bounds for ``1 <= s <= s_max``, ``1 <= f <= f_max``.

    With `check`, raises :class:`PropertyViolation` unless the table is
    non-increasing in both arguments and symmetric, within 1e-8.
    """
    s_max = _check_sparsity("s_max", s_max)
    f_max = _check_sparsity("f_max", f_max)
    if max(s_max, f_max) > MAX_TABLE:
        raise BudgetError(f"table size ({s_max}, {f_max}) exceeds the budget of {MAX_TABLE}")
    A = np.empty((s_max, f_max))
    for s in range(1, s_max + 1):
        for f in range(1, f_max + 1):
            A[s - 1, f - 1] = alpha_upper_alternating(
                s, f, n_eff, restarts=restarts, seed=seed, workers=workers).alpha_upper
    if check:
        bad = table_violations(A)
        if bad:
            raise PropertyViolation("; ".join(bad))
    return A
