"""The Lie group of SPD matrices under the Log-Euclidean metric.

Points are :class:`SpdMatrix` values, tangent / Lie-algebra elements are
:class:`SymMatrix` values. Under the Log-Euclidean metric the group is
flat, so distances, geodesics and the group law all reduce to Euclidean
operations on matrix logarithms.
"""

from functools import cached_property

import numpy as np

from . import symlin
from .errors import InvalidInput, NotPositiveDefinite

PD_RTOL = 1e-12
# Clamp floor sits above the strict threshold so clamped output validates.
CLAMP_RTOL = 2 * PD_RTOL


class SymMatrix:
    """A symmetric matrix, immutable once built."""

    __array_priority__ = 20

    def __init__(self, entries, *, check=True):
        entries = symlin.symmetrize(entries) if check else np.asarray(entries, dtype=float)
        entries.flags.writeable = False
        self.entries = entries

    @property
    def dim(self):
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __add__(self, other):
        return SymMatrix(self.entries + _arr(other), check=False)

    __radd__ = __add__

    def __sub__(self, other):
        return SymMatrix(self.entries - _arr(other), check=False)

    def __rsub__(self, other):
        return SymMatrix(_arr(other) - self.entries, check=False)

    def __neg__(self):
        return SymMatrix(-self.entries, check=False)

    def __mul__(self, scalar):
        return SymMatrix(float(scalar) * self.entries, check=False)

    __rmul__ = __mul__

    def norm(self):
        return float(np.linalg.norm(self.entries))

    def __repr__(self):
        return f"SymMatrix({self.entries!r})"


class SpdMatrix:
    """A symmetric positive definite matrix with a lazily cached spectrum.

    The constructor validates strictly: symmetry within ``1e-9 * ||S||_F``
    and smallest eigenvalue above ``pd_tol = 1e-12 * trace / D``. Use
    :func:`make_spd` with ``mode="clamp"`` to repair near-singular input.
    """

    __array_priority__ = 20

    def __init__(self, entries, *, _eig=None):
        entries = symlin.symmetrize(entries, "S")
        entries.flags.writeable = False
        self.entries = entries
        if _eig is not None:
            self.__dict__["eig"] = _eig
        lam_min = float(self.eig.eigenvalues[0])
        if not lam_min > max(self.pd_tol, 0.0):
            raise NotPositiveDefinite(
                f"matrix is not positive definite: min eigenvalue {lam_min!r} "
                f"<= pd_tol {self.pd_tol!r}",
                lam_min,
            )

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def pd_tol(self):
        return PD_RTOL * float(np.trace(self.entries)) / self.dim

    @cached_property
    def eig(self):
        return symlin.sym_eigen(self.entries)

    @cached_property
    def log(self):
        """Principal matrix logarithm as a :class:`SymMatrix`."""
        return SymMatrix(symlin.spectral_apply(self.eig, np.log), check=False)

    @cached_property
    def sqrt(self):
        return symlin.spectral_apply(self.eig, np.sqrt)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __repr__(self):
        return f"SpdMatrix({self.entries!r})"


def _arr(x):
    if isinstance(x, (SymMatrix, SpdMatrix)):
        return x.entries
    return np.asarray(x, dtype=float)


def as_spd(S):
    """Coerce an array to :class:`SpdMatrix` (strict); pass instances through."""
    return S if isinstance(S, SpdMatrix) else SpdMatrix(S)


def as_sym(X):
    return X if isinstance(X, SymMatrix) else SymMatrix(X)


def _same_dim(*mats):
    dims = {m.dim for m in mats}
    if len(dims) != 1:
        raise InvalidInput(f"dimension mismatch: {sorted(dims)}")


def make_spd(M, mode="strict"):
    """Validate or repair a square matrix into an :class:`SpdMatrix`.

    Parameters
    ----------
    M : array_like, shape (D, D)
        Finite square matrix.
    mode : {"strict", "clamp"}
        ``"strict"`` raises :class:`NotPositiveDefinite` if the smallest
        eigenvalue is not above ``1e-12 * trace / D``. ``"clamp"``
        symmetrizes and raises every eigenvalue below the floor
        ``2e-12 * trace_+ / D`` to the floor, where ``trace_+`` sums the
        positive eigenvalues (1.0 is used as scale when there are none).

    Returns
    -------
    SpdMatrix
    """
    if mode == "strict":
        return SpdMatrix(M)
    if mode != "clamp":
        raise InvalidInput(f"mode must be 'strict' or 'clamp', got {mode!r}")
    M = symlin.as_square(M)
    M = 0.5 * (M + M.T)
    eig = symlin.sym_eigen(M)
    lam = eig.eigenvalues
    D = M.shape[0]
    scale = float(np.sum(np.clip(lam, 0.0, None))) / D
    if scale <= 0.0:
        scale = 1.0
    floor = CLAMP_RTOL * scale
    if lam[0] > floor:
        return SpdMatrix(M, _eig=eig)
    lifted = np.maximum(lam, floor)
    V = eig.eigenvectors
    entries = (V * lifted) @ V.T
    entries = 0.5 * (entries + entries.T)
    return SpdMatrix(entries, _eig=symlin.SymEigen(lifted, V))


def log_spd(S):
    """Principal matrix logarithm."""
    return as_spd(S).log


def exp_sym(X):
    """Matrix exponential of a symmetric matrix; always SPD."""
    X = as_sym(X)
    eig = symlin.sym_eigen(X.entries)
    entries = symlin.spectral_apply(eig, np.exp)
    return SpdMatrix(entries, _eig=symlin.SymEigen(np.exp(eig.eigenvalues), eig.eigenvectors))


def group_op(S1, S2):
    """Log-Euclidean group product ``exp(log S1 + log S2)``."""
    S1, S2 = as_spd(S1), as_spd(S2)
    _same_dim(S1, S2)
    return exp_sym(S1.log + S2.log)


def group_inverse(S):
    return exp_sym(-as_spd(S).log)


def lem_sq_distance(S1, S2):
    S1, S2 = as_spd(S1), as_spd(S2)
    _same_dim(S1, S2)
    diff = S1.log.entries - S2.log.entries
    return float(np.sum(diff * diff))


def lem_distance(S1, S2):
    """Log-Euclidean geodesic distance ``||log S1 - log S2||_F``."""
    return float(np.sqrt(lem_sq_distance(S1, S2)))


def exp_at(S1, T):
    """Riemannian exponential at ``S1``: ``exp(log S1 + D log(S1)[T])``."""
    S1 = as_spd(S1)
    T = as_sym(T)
    _same_dim(S1, T)
    return exp_sym(S1.log + symlin.frechet_log(S1.entries, T.entries, eig=S1.eig))


def log_at(S1, S2):
    """Riemannian logarithm at ``S1``: ``D exp(log S1)[log S2 - log S1]``."""
    S1, S2 = as_spd(S1), as_spd(S2)
    _same_dim(S1, S2)
    X1 = S1.log.entries
    return SymMatrix(symlin.frechet_exp(X1, S2.log.entries - X1), check=False)


def spd_first_difference(Sx, Sxu):
    """Discrete first derivative ``Sx^1/2 (log Sxu - log Sx) Sx^1/2``."""
    Sx, Sxu = as_spd(Sx), as_spd(Sxu)
    _same_dim(Sx, Sxu)
    R = Sx.sqrt
    out = R @ (Sxu.log.entries - Sx.log.entries) @ R
    return SymMatrix(0.5 * (out + out.T), check=False)


def spd_laplace_beltrami(Sm, S0, Sp):
    """Second-difference approximation of the Laplace-Beltrami operator.

    ``Sm``, ``S0`` and ``Sp`` are samples of a curve at ``x - u``, ``x`` and
    ``x + u``; the result is the sum of the forward and backward first
    differences taken at ``S0``.
    """
    return spd_first_difference(S0, Sp) + spd_first_difference(S0, Sm)
