"""Numerical checks of the Lie-LPP versus LPP comparison results.

The weight-dominance hypothesis ``W >= W_tilde`` (vector-descriptor weights
dominating SPD-descriptor weights) is verified on the inputs, never
assumed.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import HypothesisNotMet, InvalidInput
from .symlin import sym_eigen

REL_TOL = 1e-9


@dataclass(frozen=True)
class DominanceReport:
    psd_margin: float
    eigen_gaps: list
    holds: bool


class ReductionErrors(NamedTuple):
    E_norm: float
    E_tilde_norm: float
    holds: bool


class RankOneResult(NamedTuple):
    max_residual: float
    holds: bool


def _check_weights(W, name):
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise InvalidInput(f"{name} must be square, got shape {W.shape}")
    if not np.all(np.isfinite(W)):
        raise InvalidInput(f"{name} has non-finite entries")
    if np.any(W < 0.0):
        raise InvalidInput(f"{name} has negative entries")
    if np.any(np.diag(W) != 0.0):
        raise InvalidInput(f"{name} has a nonzero diagonal")
    if np.max(np.abs(W - W.T), initial=0.0) > 1e-12 * max(np.max(W, initial=0.0), 1.0):
        raise InvalidInput(f"{name} is not symmetric")
    return 0.5 * (W + W.T)


def _check_pair(W, W_tilde):
    W = _check_weights(W, "W")
    Wt = _check_weights(W_tilde, "W_tilde")
    if W.shape != Wt.shape:
        raise InvalidInput(f"weight shapes differ: {W.shape} vs {Wt.shape}")
    bad = np.argwhere(W < Wt)
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise HypothesisNotMet(
            f"weight dominance fails at ({i}, {j}): W={W[i, j]!r} < W_tilde={Wt[i, j]!r}",
            (i, j),
        )
    return W, Wt


def laplacian(W):
    W = np.asarray(W, dtype=float)
    return np.diag(W.sum(axis=0)) - W


def laplacian_dominance_check(W, W_tilde):
    """Check ``L >= L_tilde`` in the Loewner order and eigenvalue by eigenvalue.

    Raises :class:`HypothesisNotMet` unless ``W >= W_tilde`` entrywise.
    """
    W, Wt = _check_pair(W, W_tilde)
    L, Lt = laplacian(W), laplacian(Wt)
    lam = sym_eigen(L).eigenvalues
    lam_t = sym_eigen(Lt).eigenvalues
    margin = float(sym_eigen(L - Lt).eigenvalues[0])
    gaps = (lam - lam_t).tolist()
    tol = -REL_TOL * max(float(lam[-1]), 0.0)
    holds = margin >= tol and all(g >= tol for g in gaps)
    return DominanceReport(margin, gaps, bool(holds))


def reduction_error_compare(W, W_tilde, d):
    """Compare the sums of the ``d`` smallest Laplacian eigenvalues.

    Returns ``(E_norm, E_tilde_norm, holds)`` with ``holds`` true when the
    SPD-side error does not exceed the vector-side error.
    """
    W, Wt = _check_pair(W, W_tilde)
    n = W.shape[0]
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or not 1 <= d <= n:
        raise InvalidInput(f"d must be in [1, {n}], got {d!r}")
    lam = sym_eigen(laplacian(W)).eigenvalues
    lam_t = sym_eigen(laplacian(Wt)).eigenvalues
    E, Et = float(lam[:d].sum()), float(lam_t[:d].sum())
    scale = max(float(np.abs(lam).max(initial=0.0)), 1.0) * d
    return ReductionErrors(E, Et, bool(Et <= E + REL_TOL * scale))


def rank_one_lie_side(xs, W_tilde):
    """``S^T W_tilde S`` with ``S`` the stacked blocks ``x_i^T x_i``.

    Assembled literally: ``S`` is (N*D, D) and the block weight matrix is
    ``W_tilde`` Kronecker ``I_D``.
    """
    xs = np.asarray(xs, dtype=float)
    N, D = xs.shape
    S = np.concatenate([np.outer(x, x) for x in xs], axis=0)
    Wblk = np.kron(W_tilde, np.eye(D))
    return S.T @ Wblk @ S


def rank_one_vector_side(xs, W_tilde):
    """``X^T W_V X`` with ``W_V = diag(x_i) (W_tilde x I_D) diag(x_i^T)``."""
    xs = np.asarray(xs, dtype=float)
    N, D = xs.shape
    left = np.zeros((N, N * D))
    for i, x in enumerate(xs):
        left[i, i * D : (i + 1) * D] = x
    W_V = left @ np.kron(W_tilde, np.eye(D)) @ left.T
    return xs.T @ W_V @ xs


def rank_one_equivalence_check(xs, W_tilde):
    """Check the rank-one identity ``S^T W_tilde S = X^T W_V X``.

    Here each SPD-side descriptor is the outer product ``x_i^T x_i`` of a
    row vector (no logarithm), and ``W_V`` has entries
    ``W_tilde_ij <x_i, x_j>``. Returns ``(max_residual, holds)`` where the
    residual is the largest absolute entry difference and ``holds`` uses a
    ``1e-10`` tolerance relative to the largest entry.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2:
        raise InvalidInput(f"xs must be (N, D), got shape {xs.shape}")
    Wt = np.asarray(W_tilde, dtype=float)
    if Wt.shape != (xs.shape[0], xs.shape[0]):
        raise InvalidInput(f"W_tilde has shape {Wt.shape}, expected {(xs.shape[0],) * 2}")
    lhs = rank_one_lie_side(xs, Wt)
    rhs = rank_one_vector_side(xs, Wt)
    resid = float(np.max(np.abs(lhs - rhs), initial=0.0))
    scale = max(float(np.max(np.abs(lhs), initial=0.0)), 1.0)
    return RankOneResult(resid, bool(resid <= 1e-10 * scale))


def random_weight_pair(rng, n, density=0.5):
    """Random ``(W, W_tilde)`` with ``W >= W_tilde``, both valid weight matrices."""
    mask = np.triu(rng.random((n, n)) < density, 1)
    Wt = np.triu(rng.random((n, n)), 1) * mask
    extra = np.triu(rng.random((n, n)), 1) * np.triu(rng.random((n, n)) < density, 1)
    W = np.minimum(Wt + extra, 1.0)
    W = np.maximum(W, Wt)
    return W + W.T, Wt + Wt.T


def run_suites(seed=0, trials=200, n_range=(3, 12)):
    """Randomized batches for the three checks; returns a summary dict."""
    rng = np.random.default_rng(seed)
    dom = red = 0
    for _ in range(trials):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        W, Wt = random_weight_pair(rng, n)
        dom += laplacian_dominance_check(W, Wt).holds
        red += all(
            reduction_error_compare(W, Wt, d).holds for d in sorted({1, -(-n // 2), n})
        )
    rank_ok, worst = 0, 0.0
    for _ in range(trials // 2):
        N, D = int(rng.integers(1, 13)), int(rng.integers(1, 9))
        xs = rng.standard_normal((N, D))
        Wt = np.triu(rng.random((N, N)), 1)
        res = rank_one_equivalence_check(xs, Wt + Wt.T)
        rank_ok += res.holds
        worst = max(worst, res.max_residual)
    return {
        "seed": seed,
        "laplacian_dominance": {"trials": trials, "holds": dom},
        "reduction_error": {"trials": trials, "holds": red},
        "rank_one_equivalence": {"trials": trials // 2, "holds": rank_ok, "max_residual": worst},
    }
