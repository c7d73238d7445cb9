"""k-NN neighbourhood graphs, heat-kernel weights and graph Laplacians."""

from dataclasses import dataclass

import numpy as np

from .descriptors import DescriptorSet
from .errors import DegenerateInput, InvalidInput
from .spd import SpdMatrix, SymMatrix

METRICS = ("lem", "em")


def check_metric(metric):
    m = str(metric).lower()
    if m not in METRICS:
        raise InvalidInput(f"metric must be 'lem' or 'em', got {metric!r}")
    return m


@dataclass(frozen=True, eq=False)
class NeighborGraph:
    """Symmetrized k-NN graph.

    ``edges`` has one row ``(i, j, squared_distance)`` per undirected edge
    with ``i < j``, sorted by ``(i, j)``.
    """

    n: int
    edges: np.ndarray
    k: int
    metric_tag: str

    @property
    def pairs(self):
        return self.edges[:, :2].astype(int)

    @property
    def sq_distances(self):
        return self.edges[:, 2]


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Dense heat-kernel weights ``W``, degrees ``D`` and Laplacian ``L = D - W``."""

    W: np.ndarray
    D: np.ndarray
    L: np.ndarray
    t: float
    graph: NeighborGraph | None = None

    @property
    def n(self):
        return self.W.shape[0]

    @classmethod
    def from_weights(cls, W, t=float("nan"), graph=None):
        W = np.asarray(W, dtype=float)
        deg = W.sum(axis=0)
        return cls(W, deg, np.diag(deg) - W, t, graph)


def flatten_points(points, metric):
    """Rows whose Euclidean distances realize the chosen metric.

    For SPD input this is the flattened matrix logarithm (LEM) or the raw
    entries (EM); vector input is used as-is under either tag.
    """
    metric = check_metric(metric)
    if isinstance(points, DescriptorSet):
        stack = points.logs() if metric == "lem" else points.entries()
        return stack.reshape(len(points), -1)
    if hasattr(points, "vectors"):
        points = points.vectors
    if len(points) and isinstance(points[0], SpdMatrix):
        return flatten_points(DescriptorSet(list(points)), metric)
    X = np.asarray(points, dtype=float)
    return X.reshape(X.shape[0], -1)


def pairwise_sq_distances(X):
    """Squared Euclidean distances between rows, computed by differences."""
    n, p = X.shape
    out = np.empty((n, n))
    # row blocks keep the broadcast difference array near 2**22 entries
    step = max(1, (1 << 22) // max(n * p, 1))
    for start in range(0, n, step):
        diff = X[start : start + step, None, :] - X[None, :, :]
        out[start : start + step] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def knn_graph(points, k, metric="lem"):
    """Symmetric k-nearest-neighbour graph (union rule).

    Parameters
    ----------
    points : DescriptorSet, sequence of SpdMatrix, or array (N, ...)
    k : int
        Neighbours per node, ``1 <= k < N``.
    metric : {"lem", "em"}

    Distance ties are broken by lower node index.
    """
    metric = check_metric(metric)
    X = flatten_points(points, metric)
    n = X.shape[0]
    if n < 2:
        raise InvalidInput("need at least 2 points")
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 1 <= k < n:
        raise InvalidInput(f"k must satisfy 1 <= k < n={n}, got {k!r}")
    D2 = pairwise_sq_distances(X)
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n):
        order = np.argsort(D2[i], kind="stable")
        order = order[order != i][:k]
        adj[i, order] = True
    adj |= adj.T
    ii, jj = np.nonzero(np.triu(adj, 1))
    edges = np.column_stack([ii, jj, D2[ii, jj]]).astype(float)
    return NeighborGraph(n, edges, int(k), metric)


def auto_bandwidth(sq_distances):
    """Median edge squared distance, ignoring zeros when the median is zero."""
    sq = np.asarray(sq_distances, dtype=float)
    if sq.size == 0:
        return 1.0
    t = float(np.median(sq))
    if t <= 0.0:
        pos = sq[sq > 0.0]
        t = float(np.median(pos)) if pos.size else 1.0
    return t


def heat_weights(g, t="auto"):
    """Heat-kernel weights ``exp(-d^2 / t)`` on the graph's edges."""
    if t == "auto" or t is None:
        t = auto_bandwidth(g.sq_distances)
    t = float(t)
    if not np.isfinite(t) or t <= 0.0:
        raise InvalidInput(f"bandwidth t must be > 0, got {t!r}")
    W = np.zeros((g.n, g.n))
    if len(g.edges):
        i, j = g.pairs.T
        w = np.exp(-g.sq_distances / t)
        W[i, j] = w
        W[j, i] = w
    return WeightedGraph.from_weights(W, t, g)


def normalized_laplacian_apply(values, wg):
    """Random-walk normalized Laplacian ``f(i) - sum_j W_ij f(j) / deg(i)``.

    ``values`` may be an array with one scalar (or vector) per node, a list
    of :class:`SymMatrix`, or a list of :class:`SpdMatrix`. For SPD values
    the log-domain residual is conjugated by ``S_i^(1/2)`` and a list of
    :class:`SymMatrix` is returned.
    """
    W = wg.W
    deg = W.sum(axis=1)
    if np.any(deg <= 0.0):
        node = int(np.flatnonzero(deg <= 0.0)[0])
        raise DegenerateInput(f"node {node} has zero degree")
    Wbar = W / deg[:, None]
    n = W.shape[0]
    if len(values) != n:
        raise InvalidInput(f"expected {n} values, got {len(values)}")

    if isinstance(values[0], SpdMatrix):
        logs = np.stack([s.log.entries for s in values])
        resid = logs - np.einsum("ij,jab->iab", Wbar, logs)
        out = []
        for s, r in zip(values, resid):
            m = s.sqrt @ r @ s.sqrt
            out.append(SymMatrix(0.5 * (m + m.T), check=False))
        return out
    if isinstance(values[0], SymMatrix):
        stack = np.stack([v.entries for v in values])
        resid = stack - np.einsum("ij,jab->iab", Wbar, stack)
        return [SymMatrix(r, check=False) for r in resid]
    f = np.asarray(values, dtype=float)
    return f - np.tensordot(Wbar, f, axes=1)
