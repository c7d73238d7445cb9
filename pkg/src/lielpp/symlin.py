"""Dense symmetric linear algebra.

Eigendecomposition by parallel-ordered cyclic Jacobi, spectral matrix
functions, Daleckii-Krein Frechet derivatives of ``log``/``exp`` and a
Cholesky-reduced solver for symmetric-definite pencils.

All routines take and return plain ``numpy`` arrays in float64.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DegenerateInput, DomainError, InvalidInput

SYM_TOL = 1e-9
JACOBI_TOL = 1e-14
CONFLUENT_TOL = 1e-12
MAX_COND = 1e12
MAX_SWEEPS = 100


@dataclass(frozen=True, eq=False)
class SymEigen:
    """Eigenpairs of a symmetric matrix.

    ``eigenvalues`` are ascending; column ``i`` of ``eigenvectors`` belongs
    to ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


@dataclass(frozen=True, eq=False)
class GenEigenResult:
    """Bottom eigenpairs of ``M a = lambda B_reg a``, with ``A^T B_reg A = I``."""

    eigenvalues: np.ndarray
    basis: np.ndarray
    regularization_applied: float


def as_square(M, name="M"):
    """Return ``M`` as a finite float64 square array or raise InvalidInput."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInput(f"{name} must be a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInput(f"{name} has non-finite entries")
    return M


def symmetrize(M, name="M"):
    """Check approximate symmetry and return ``(M + M^T) / 2``."""
    M = as_square(M, name)
    scale = np.linalg.norm(M)
    if np.linalg.norm(M - M.T) > SYM_TOL * scale:
        raise InvalidInput(f"{name} is not symmetric")
    return 0.5 * (M + M.T)


@lru_cache(maxsize=None)
def _round_robin(n):
    # Each round is a set of disjoint (p, q) pairs; n - 1 (or n) rounds cover
    # every pair exactly once.
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        if ps:
            rounds.append((np.array(ps), np.array(qs)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(A):
    return float(np.linalg.norm(A - np.diag(np.diag(A))))


def _jacobi(A):
    n = A.shape[0]
    V = np.eye(n)
    if n == 1:
        return np.diag(A).copy(), V
    target = JACOBI_TOL * np.linalg.norm(A)
    rounds = _round_robin(n)
    prev = np.inf
    for _ in range(MAX_SWEEPS):
        off = _off_norm(A)
        if off <= target or off >= prev:
            break
        prev = off
        for p, q in rounds:
            # the pairs in a round are disjoint, so their rotations commute and
            # combine into one orthogonal J applied as A <- J^T A J
            apq = A[p, q]
            with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                # overflow to inf gives t = 0, the correct limit
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
            sign = np.where(theta >= 0.0, 1.0, -1.0)
            t = np.where(apq != 0.0, sign / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            J = np.eye(n)
            J[p, p] = c
            J[q, q] = c
            J[p, q] = s
            J[q, p] = -s
            A = J.T @ A @ J
            A[p, q] = 0.0
            A[q, p] = 0.0
            V = V @ J
        A = 0.5 * (A + A.T)
    return np.diag(A).copy(), V


def fix_signs(V):
    """Flip columns so each column's largest-magnitude entry is positive."""
    V = np.array(V, dtype=float)
    if V.size == 0:
        return V
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.where(V[idx, np.arange(V.shape[1])] < 0.0, -1.0, 1.0)
    return V * signs


def sym_eigen(M):
    """Eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    M : array_like, shape (D, D)
        Symmetric up to ``1e-9 * ||M||_F``; symmetrized before use.

    Returns
    -------
    SymEigen
        Ascending eigenvalues and an orthogonal eigenvector matrix whose
        columns have their largest-magnitude entry positive.
    """
    A = symmetrize(M)
    lam, V = _jacobi(A.copy())
    order = np.argsort(lam, kind="stable")
    return SymEigen(lam[order], fix_signs(V[:, order]))


def _eig_of(M, eig):
    return eig if eig is not None else sym_eigen(M)


def spectral_apply(eig, f):
    """Assemble ``V f(Lambda) V^T`` from a precomputed decomposition."""
    lam = eig.eigenvalues
    with np.errstate(all="ignore"):
        fl = np.asarray(f(lam), dtype=float)
    bad = ~np.isfinite(fl)
    if bad.any():
        value = float(lam[bad][0])
        raise DomainError(f"function undefined at eigenvalue {value!r}", value)
    V = eig.eigenvectors
    out = (V * fl) @ V.T
    return 0.5 * (out + out.T)


def sym_func(M, f, eig=None):
    """Apply a scalar function to a symmetric matrix through its spectrum.

    ``f`` must be vectorized over a numpy array of eigenvalues. A
    non-finite result at any eigenvalue (``log`` of a nonpositive value,
    for example) raises :class:`DomainError` carrying that eigenvalue.
    """
    return spectral_apply(_eig_of(M, eig), f)


def _confluent(li, lj):
    scale = np.maximum(np.maximum(np.abs(li), np.abs(lj)), 1.0)
    return np.abs(li - lj) <= CONFLUENT_TOL * scale


def loewner_log(lam):
    """Divided differences of ``log`` on a positive spectrum."""
    li, lj = lam[:, None], lam[None, :]
    conf = _confluent(li, lj)
    diff = np.where(conf, 1.0, li - lj)
    # log1p form avoids cancellation for close, non-confluent pairs
    dd = np.log1p(diff / lj) / diff
    return np.where(conf, 2.0 / (li + lj), dd)


def loewner_exp(lam):
    """Divided differences of ``exp``."""
    li, lj = lam[:, None], lam[None, :]
    conf = _confluent(li, lj)
    diff = np.where(conf, 1.0, li - lj)
    dd = np.exp(lj) * np.expm1(diff) / diff
    return np.where(conf, np.exp(0.5 * (li + lj)), dd)


def _daleckii_krein(eig, T, loewner):
    V = eig.eigenvectors
    out = V @ (loewner(eig.eigenvalues) * (V.T @ T @ V)) @ V.T
    return 0.5 * (out + out.T)


def frechet_log(S, T, eig=None):
    """Directional derivative ``D log(S)[T]`` for SPD ``S`` and symmetric ``T``."""
    T = symmetrize(T, "T")
    eig = _eig_of(S, eig)
    lam_min = float(eig.eigenvalues[0])
    if lam_min <= 0.0:
        raise DomainError(f"S is not positive definite (min eigenvalue {lam_min!r})", lam_min)
    return _daleckii_krein(eig, T, loewner_log)


def frechet_exp(X, T, eig=None):
    """Directional derivative ``D exp(X)[T]`` for symmetric ``X`` and ``T``."""
    T = symmetrize(T, "T")
    return _daleckii_krein(_eig_of(X, eig), T, loewner_exp)


def _auto_regularization(B, tau):
    lam = sym_eigen(B).eigenvalues
    lo, hi = float(lam[0]), float(lam[-1])
    if lo > 0.0 and hi / lo <= MAX_COND:
        return 0.0
    eps = 1e-12
    while True:
        shift = eps * tau
        if lo + shift > 0.0 and (hi + shift) / (lo + shift) <= MAX_COND:
            return eps
        eps *= 10.0


def gen_eig_sym_def(M, B, d, reg="auto"):
    """Smallest ``d`` eigenpairs of the pencil ``(M, B_reg)``.

    Parameters
    ----------
    M, B : array_like, shape (D, D)
        Symmetric positive semidefinite.
    d : int
        Number of eigenpairs, ``1 <= d <= D``.
    reg : float or "auto"
        Relative ridge ``eps``: ``B_reg = B + eps * trace(B) / D * I``. With
        ``"auto"`` no ridge is added when ``cond(B) <= 1e12``; otherwise the
        smallest power of ten from ``1e-12`` up that brings the condition
        number to ``1e12`` is used.

    Returns
    -------
    GenEigenResult
        Ascending eigenvalues, a ``B_reg``-orthonormal basis and the
        ``eps`` that was applied.
    """
    M = symmetrize(M, "M")
    B = symmetrize(B, "B")
    D = M.shape[0]
    if B.shape != M.shape:
        raise InvalidInput(f"pencil shapes differ: {M.shape} vs {B.shape}")
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or not 1 <= d <= D:
        raise InvalidInput(f"d must be an integer in [1, {D}], got {d!r}")
    if not np.any(B):
        raise DegenerateInput("B is the zero matrix")

    tau = float(np.trace(B)) / D
    if reg == "auto":
        eps = _auto_regularization(B, tau)
    else:
        eps = float(reg)
        if not np.isfinite(eps) or eps < 0.0:
            raise InvalidInput(f"reg must be >= 0 or 'auto', got {reg!r}")
    B_reg = B + eps * tau * np.eye(D)

    try:
        Lc = np.linalg.cholesky(B_reg)
    except np.linalg.LinAlgError:
        raise DegenerateInput(
            f"B + {eps:g} * trace(B)/D * I is not positive definite"
        ) from None
    Y = solve_triangular(Lc, M, lower=True)
    C = solve_triangular(Lc, Y.T, lower=True).T
    eig = sym_eigen(0.5 * (C + C.T))
    U = eig.eigenvectors[:, :d]
    A = solve_triangular(Lc, U, lower=True, trans="T")
    return GenEigenResult(eig.eigenvalues[:d].copy(), fix_signs(A), eps)
