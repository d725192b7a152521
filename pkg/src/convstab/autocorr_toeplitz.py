"""
Hermitian Toeplitz matrices generated by autocorrelations.

For a vector ``a`` of length n the autocorrelation is

    b_k(a) = sum_l conj(a_l) a_{l+k},    k = 0, ..., n-1,

with ``b_{-k} = conj(b_k)``. The matrix ``B_a`` has entry ``(i, j) = b_{j-i}``
(first row ``b_0 .. b_{n-1}``). With this layout the squared norm of a
convolution is the quadratic form

    ||x * y||^2 = sum_{r,c} x_r B_y[r, c] conj(x_c),

see :func:`quadratic_form`. The minimizer over unit ``x`` is therefore the
complex conjugate of the smallest eigenvector of ``B_y``.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from convstab.errors import InputError

HERMITIAN_TOL = 1e-12


def _as_vector(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 1 or a.size == 0:
        raise InputError("expected a non-empty 1-D vector")
    if not np.all(np.isfinite(a)):
        raise InputError("vector entries must be finite")
    return a


def autocorrelation(a):
    """Return ``b_0, ..., b_{n-1}`` for the vector `a` (out-of-range terms are zero)."""
    a = _as_vector(a)
    n = a.size
    # np.vdot conjugates its first argument
    return np.array([np.vdot(a[:n - k], a[k:]) for k in range(n)], dtype=complex)


def toeplitz_from_autocorr(b):
    """Dense Hermitian Toeplitz matrix with entry ``(i, j) = b_{j-i}``."""
    b = np.asarray(b, dtype=complex)
    # scipy.linalg.toeplitz(c, r): first column c, first row r
    return scipy.linalg.toeplitz(np.conj(b), b)


@dataclass(frozen=True, eq=False)
class AutocorrToeplitz:
    """Hermitian Toeplitz matrix ``B_a`` stored by its autocorrelation.

    Attributes
    ----------
    autocorr : ndarray
        ``b_0, ..., b_{n-1}``; the lower triangle is implied by ``b_{-k} = conj(b_k)``.
    generator : ndarray or None
        The vector ``a`` the matrix was built from, if known.
    """

    autocorr: np.ndarray
    generator: np.ndarray = field(default=None)

    def __post_init__(self):
        b = np.array(self.autocorr, dtype=complex).ravel()
        if b.size == 0:
            raise InputError("autocorrelation must be non-empty")
        if not np.all(np.isfinite(b)):
            raise InputError("autocorrelation entries must be finite")
        if abs(b[0].imag) > HERMITIAN_TOL * max(1.0, abs(b[0])):
            raise InputError("b_0 must be real")
        b[0] = b[0].real
        b.setflags(write=False)
        object.__setattr__(self, "autocorr", b)
        if self.generator is not None:
            g = np.array(self.generator, dtype=complex).ravel()
            g.setflags(write=False)
            object.__setattr__(self, "generator", g)

    @property
    def n(self):
        return self.autocorr.size

    @property
    def matrix(self):
        return toeplitz_from_autocorr(self.autocorr)

    @property
    def mu(self):
        """``mu_k = 2 Re b_k`` for k = 1..n-1."""
        return 2.0 * self.autocorr[1:].real

    @property
    def nu(self):
        """``nu_k = -2 Im b_k`` for k = 1..n-1."""
        return -2.0 * self.autocorr[1:].imag

    def sum_sq_autocorr(self):
        """Two-sided ``S = sum_{|k|<n} |b_k|^2 = b_0^2 + 2 sum_{k>=1} |b_k|^2``."""
        b = self.autocorr
        return float(b[0].real ** 2 + 2.0 * np.sum(np.abs(b[1:]) ** 2))

    def to_json(self):
        return {"n": self.n, "autocorr": [[z.real, z.imag] for z in self.autocorr.tolist()]}

    @classmethod
    def from_json(cls, obj):
        try:
            n = obj["n"]
            b = [complex(float(re), float(im)) for re, im in obj["autocorr"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed matrix JSON: {exc}") from None
        if n != len(b):
            raise InputError(f"n={n} does not match {len(b)} autocorrelation entries")
        return cls(np.array(b))


def build_matrix(a):
    """Build ``B_a`` from the vector `a`."""
    a = _as_vector(a)
    return AutocorrToeplitz(autocorrelation(a), generator=a)


def _symbol_terms(B, omega):
    b = B.autocorr
    k = np.arange(1, B.n)
    omega = np.asarray(omega, dtype=float)
    kw = np.multiply.outer(omega, k)
    real = b[0].real + np.cos(kw) @ B.mu + np.sin(kw) @ B.nu
    return real, kw


def symbol_eval(B, omega):
    """Evaluate the symbol ``sum_{|k|<n} b_k e^{i k omega}`` (a real number).

    Computed as ``b_0 + sum_k (mu_k cos k omega + nu_k sin k omega)``; the
    two-sided complex sum is also formed and its imaginary part checked.
    """
    real, kw = _symbol_terms(B, omega)
    b = B.autocorr[1:]
    two_sided = B.autocorr[0] + np.exp(1j * kw) @ b + np.exp(-1j * kw) @ np.conj(b)
    resid = np.max(np.abs(np.imag(two_sided)), initial=0.0)
    if resid >= 1e-12 * max(1.0, float(np.sum(np.abs(B.autocorr)))):
        raise ArithmeticError(f"symbol has imaginary residue {resid:.3e}")
    if np.ndim(real) == 0:
        return float(real)
    return real


def symbol_grid(B, grid_size=4096):
    """Symbol values on the uniform grid ``2 pi j / grid_size``, j = 0..grid_size-1."""
    if grid_size < 2 * B.n:
        raise InputError(f"grid_size {grid_size} too coarse for n={B.n} (need >= {2 * B.n})")
    omegas = 2.0 * np.pi * np.arange(grid_size) / grid_size
    real, _ = _symbol_terms(B, omegas)
    return omegas, real


def symbol_min(B, grid_size=4096):
    """Grid estimate of ``min_omega b(a, omega)``.

    This is an upper estimate of the true minimum; for autocorrelation
    generated matrices the true minimum is nonnegative.
    """
    _, vals = symbol_grid(B, grid_size)
    return float(vals.min())


def _as_hermitian(M):
    if isinstance(M, AutocorrToeplitz):
        return M.matrix
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise InputError(f"expected a non-empty square matrix, got shape {M.shape}")
    asym = np.max(np.abs(M - M.conj().T))
    if asym > HERMITIAN_TOL:
        raise InputError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    return M


def smallest_eigenvalue(M):
    """Smallest eigenvalue of a Hermitian matrix and a unit eigenvector.

    Parameters
    ----------
    M : AutocorrToeplitz or array_like
        Hermitian input; asymmetry above 1e-12 raises :class:`InputError`.

    Returns
    -------
    lam : float
    v : ndarray
        Unit vector with ``M v = lam v``.
    """
    M = _as_hermitian(M)
    w, V = np.linalg.eigh(M)
    return float(w[0]), V[:, 0]


def smallest_eigenvalues(stack):
    """Smallest eigenvalues and eigenvectors of a stack of Hermitian matrices."""
    w, V = np.linalg.eigh(stack)
    return w[..., 0], V[..., :, 0]


def principal_submatrix(B, I):
    """Rows and columns `I` of `B`, in increasing index order."""
    M = B.matrix if isinstance(B, AutocorrToeplitz) else np.asarray(B)
    n = M.shape[0]
    idx = sorted(int(i) for i in I)
    if len(set(idx)) != len(idx):
        raise InputError("index set has duplicates")
    if idx and (idx[0] < 0 or idx[-1] >= n):
        raise InputError(f"indices {idx} outside [0, {n - 1}]")
    return M[np.ix_(idx, idx)]


def quadratic_form(B, x):
    """``sum_{r,c} x_r B[r, c] conj(x_c)`` as a real number.

    For ``B = B_y`` this equals ``||x * y||^2``.
    """
    M = B.matrix if isinstance(B, AutocorrToeplitz) else np.asarray(B, dtype=complex)
    x = np.asarray(x, dtype=complex).ravel()
    if x.size != M.shape[0]:
        raise InputError(f"vector length {x.size} does not match matrix size {M.shape[0]}")
    q = x @ M @ np.conj(x)
    scale = max(1.0, float(np.vdot(x, x).real) * float(np.max(np.abs(M))))
    if abs(q.imag) >= 1e-12 * scale:
        raise ArithmeticError(f"quadratic form has imaginary residue {q.imag:.3e}")
    return float(q.real)


def abs_det(M):
    """``|det M|`` from a partially pivoted LU factorization."""
    M = M.matrix if isinstance(M, AutocorrToeplitz) else np.asarray(M, dtype=complex)
    lu, _ = scipy.linalg.lu_factor(M, check_finite=False)
    return float(np.prod(np.abs(np.diag(lu))))


def det_eigen_lower_bound(B):
    """Determinant lower bound on the smallest eigenvalue.

    Returns ``|det B| / (sqrt(n) * S^((n-1)/2))`` where ``S`` is the two-sided
    sum of squared autocorrelations.
    """
    n = B.n
    S = B.sum_sq_autocorr()
    return abs_det(B) / (np.sqrt(n) * S ** ((n - 1) / 2.0))


def random_unit_vector(rng, n):
    """Complex Gaussian vector of length n, normalized to unit norm."""
    a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return a / np.linalg.norm(a)
