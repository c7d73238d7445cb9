"""Lie-LPP on SPD matrices and the vector LPP baseline.

Lie-LPP learns a full-column-rank ``A`` (D x d) and maps each descriptor
through ``S -> exp(A^T log(S) A)``, a homomorphism of the Log-Euclidean
group onto the d x d SPD group. ``A`` holds the bottom generalized
eigenvectors of the pencil ``(S^T L S, S^T D S)`` built on a heat-kernel
k-NN graph; the N*D x N*D block matrices are never formed, both sides are
accumulated directly as D x D sums.
"""

from dataclasses import dataclass

import numpy as np

from . import symlin
from .descriptors import DescriptorSet
from .errors import InvalidInput
from .graph import check_metric, heat_weights, knn_graph
from .spd import SpdMatrix, as_spd, exp_sym, SymMatrix


@dataclass(frozen=True, eq=False)
class ProjectionMap:
    """Learned Lie-LPP map."""

    A: np.ndarray
    eigenvalues: np.ndarray
    metric_tag: str
    k: int
    t: float
    regularization_applied: float

    @property
    def D(self):
        return self.A.shape[0]

    @property
    def d(self):
        return self.A.shape[1]

    def to_dict(self):
        return {
            "D": self.D,
            "d": self.d,
            "metric": self.metric_tag,
            "k": self.k,
            "t": self.t,
            "regularization_applied": self.regularization_applied,
            "eigenvalues": self.eigenvalues.tolist(),
            "A": self.A.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        A = np.asarray(data["A"], dtype=float)
        if A.ndim != 2 or A.shape != (data["D"], data["d"]):
            raise InvalidInput(f"A has shape {A.shape}, expected ({data['D']}, {data['d']})")
        return cls(
            A,
            np.asarray(data["eigenvalues"], dtype=float),
            check_metric(data["metric"]),
            int(data["k"]),
            float(data["t"]),
            float(data.get("regularization_applied", 0.0)),
        )


@dataclass(frozen=True, eq=False)
class LppMap:
    """Learned vector LPP map ``y = a^T x``."""

    a: np.ndarray
    eigenvalues: np.ndarray
    k: int = 0
    t: float = float("nan")
    regularization_applied: float = 0.0


def _domain_stack(data, metric):
    return data.logs() if metric == "lem" else data.entries()


def pencil_matrices(X, wg):
    """``(S^T L S, S^T D S)`` for stacked symmetric blocks ``X`` (N, D, D).

    ``S^T L S = sum_i D_ii X_i X_i - sum_ij W_ij X_i X_j``, both sides
    symmetrized after accumulation.
    """
    deg = wg.D
    XX = np.einsum("iab,ibc->iac", X, X)
    B = np.einsum("i,iab->ab", deg, XX)
    # sum_ij W_ij X_i X_j = sum_i X_i Y_i with Y_i = sum_j W_ij X_j
    Y = np.einsum("ij,jab->iab", wg.W, X)
    M = B - np.einsum("iab,ibc->ac", X, Y)
    return 0.5 * (M + M.T), 0.5 * (B + B.T)


def _check_fit_args(N, D, k, d):
    if N < 3:
        raise InvalidInput(f"need at least 3 samples, got {N}")
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or not 1 <= d < D:
        raise InvalidInput(f"target dimension must satisfy 1 <= d < D={D}, got {d!r}")
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 1 <= k < N:
        raise InvalidInput(f"k must satisfy 1 <= k < N={N}, got {k!r}")


def lie_lpp_fit(data, k=5, t="auto", d=3, metric="lem", reg="auto"):
    """Fit a Lie-LPP projection.

    Parameters
    ----------
    data : DescriptorSet
        N >= 3 SPD descriptors of size D.
    k : int
        Neighbours per point in the adjacency graph.
    t : float or "auto"
        Heat-kernel bandwidth; ``"auto"`` takes the median edge squared
        distance.
    d : int
        Output size, ``1 <= d < D``.
    metric : {"lem", "em"}
        ``"lem"`` works on matrix logarithms. ``"em"`` is the ablation that
        uses raw entries both for the graph and for the pencil.
    reg : float or "auto"
        Passed to :func:`lielpp.symlin.gen_eig_sym_def`.

    Returns
    -------
    ProjectionMap
    """
    metric = check_metric(metric)
    if not isinstance(data, DescriptorSet):
        data = DescriptorSet(list(data))
    _check_fit_args(len(data), data.dim, k, d)
    wg = heat_weights(knn_graph(data, k, metric), t)
    M, B = pencil_matrices(_domain_stack(data, metric), wg)
    res = symlin.gen_eig_sym_def(M, B, d, reg)
    return ProjectionMap(res.basis, res.eigenvalues, metric, int(k), wg.t, res.regularization_applied)


def lie_lpp_transform(pmap, S):
    """Map one descriptor to the reduced group.

    LEM maps return ``exp(A^T log(S) A)``; EM-ablation maps return the
    congruence ``A^T S A``, which is SPD because ``A`` has full column rank.
    """
    S = as_spd(S)
    if S.dim != pmap.D:
        raise InvalidInput(f"descriptor size {S.dim} does not match map size {pmap.D}")
    A = pmap.A
    if pmap.metric_tag == "em":
        return SpdMatrix(A.T @ S.entries @ A)
    return exp_sym(SymMatrix(A.T @ S.log.entries @ A, check=False))


def lie_lpp_transform_set(pmap, data):
    return DescriptorSet(
        [lie_lpp_transform(pmap, s) for s in data.descriptors],
        list(data.labels),
        list(data.source_ids),
    )


def lie_lpp_energy(A, data, wg, metric="lem"):
    """Locality energy ``1/2 sum_ij W_ij ||A^T (X_i - X_j) A||_F^2``."""
    A = np.asarray(A, dtype=float)
    X = _domain_stack(data, check_metric(metric))
    if A.ndim != 2 or A.shape[0] != X.shape[1]:
        raise InvalidInput(f"A has shape {A.shape}, descriptors are {X.shape[1]}x{X.shape[1]}")
    if wg.n != X.shape[0]:
        raise InvalidInput("graph size does not match the descriptor count")
    Z = np.einsum("ai,nab,bj->nij", A, X, A)
    i, j = np.nonzero(np.triu(wg.W, 1))
    diff = Z[i] - Z[j]
    # each unordered pair appears twice in the ordered sum, cancelling the 1/2
    return float(np.sum(wg.W[i, j] * np.einsum("nij,nij->n", diff, diff)))


def pencil_energy(A, data, wg, metric="lem"):
    """Quadratic energy ``1/2 sum_ij W_ij ||(X_i - X_j) A||_F^2 = tr(A^T M A)``."""
    A = np.asarray(A, dtype=float)
    X = _domain_stack(data, check_metric(metric))
    Z = np.einsum("nab,bj->naj", X, A)
    i, j = np.nonzero(np.triu(wg.W, 1))
    diff = Z[i] - Z[j]
    return float(np.sum(wg.W[i, j] * np.einsum("naj,naj->n", diff, diff)))


def lpp_fit(X, k=5, t="auto", d=2, reg="auto"):
    """Vector LPP: bottom eigenvectors of ``X^T L X a = lambda X^T D X a``.

    ``X`` holds one sample per row, shape (N, D).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise InvalidInput(f"X must be (N, D), got shape {X.shape}")
    _check_fit_args(X.shape[0], X.shape[1], k, d)
    wg = heat_weights(knn_graph(X, k, "em"), t)
    return lpp_fit_graph(X, wg, d, reg, k=int(k))


def lpp_fit_graph(X, wg, d, reg="auto", k=0):
    """Vector LPP on a prebuilt weighted graph."""
    X = np.asarray(X, dtype=float)
    if wg.n != X.shape[0]:
        raise InvalidInput("graph size does not match the sample count")
    M = X.T @ wg.L @ X
    B = X.T @ (wg.D[:, None] * X)
    res = symlin.gen_eig_sym_def(0.5 * (M + M.T), 0.5 * (B + B.T), d, reg)
    return LppMap(res.basis, res.eigenvalues, k, wg.t, res.regularization_applied)


def lpp_transform(lmap, x):
    """Project one vector (D,) or a batch (N, D)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != lmap.a.shape[0]:
        raise InvalidInput(f"vector size {x.shape[-1]} does not match map size {lmap.a.shape[0]}")
    return x @ lmap.a


def vectorize_sym(stack):
    """Upper-triangle vectors with off-diagonals scaled by sqrt(2).

    Euclidean norms of the result equal Frobenius norms of the matrices.
    """
    stack = np.asarray(stack, dtype=float)
    D = stack.shape[-1]
    iu = np.triu_indices(D)
    w = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
    return stack[..., iu[0], iu[1]] * w
