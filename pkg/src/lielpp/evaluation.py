"""Nearest-neighbour recognition and evaluation reports."""

import time
from collections import Counter
from dataclasses import asdict, dataclass, field

import numpy as np

from .descriptors import DescriptorSet
from .errors import InvalidInput
from .graph import check_metric, flatten_points, pairwise_sq_distances


@dataclass(eq=False)
class VectorSet:
    """Plain feature vectors with labels, the vector-side analogue of DescriptorSet."""

    vectors: np.ndarray
    labels: list
    source_ids: list = field(default_factory=list)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=float)
        if self.vectors.ndim != 2:
            raise InvalidInput(f"vectors must be (N, D), got shape {self.vectors.shape}")
        if not self.source_ids:
            self.source_ids = [str(i) for i in range(len(self.vectors))]
        if not len(self.labels) == len(self.source_ids) == len(self.vectors):
            raise InvalidInput("vectors, labels and source_ids differ in length")

    @property
    def dim(self):
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.vectors)

    def subset(self, idx):
        idx = list(idx)
        return VectorSet(
            self.vectors[idx], [self.labels[i] for i in idx], [self.source_ids[i] for i in idx]
        )


@dataclass
class EvalReport:
    method: str
    metric: str
    dimension: str
    accuracy: float
    classes: list
    per_class: dict
    confusion: list
    n_items: int
    wall_time_fit: float = 0.0
    wall_time_eval: float = 0.0
    config: dict = field(default_factory=dict)
    version: str = ""

    def to_dict(self):
        return asdict(self)

    def canonical(self):
        """Report fields that must be reproducible: everything but wall times."""
        body = self.to_dict()
        body.pop("wall_time_fit")
        body.pop("wall_time_eval")
        return body

    def table(self):
        lines = [
            f"{'method':<16}{'dimension':>12}{'time (s)':>12}{'accuracy':>10}",
            f"{self.method:<16}{self.dimension:>12}"
            f"{self.wall_time_fit + self.wall_time_eval:>12.4f}{self.accuracy:>10.4f}",
            "",
            "per-class accuracy:",
        ]
        lines += [f"  {c:<20}{self.per_class[c]:.4f}" for c in self.classes]
        lines += ["", "confusion (rows: true, cols: predicted):"]
        width = max([len(c) for c in self.classes] + [5])
        lines.append(" " * (width + 2) + " ".join(f"{c:>{width}}" for c in self.classes))
        for c, row in zip(self.classes, self.confusion):
            lines.append(f"  {c:<{width}}" + " ".join(f"{v:>{width}}" for v in row))
        return "\n".join(lines) + "\n"


def _points_and_labels(data, metric):
    if isinstance(data, (DescriptorSet, VectorSet)):
        return flatten_points(data, metric), [str(lab) for lab in data.labels]
    raise InvalidInput("expected a DescriptorSet or VectorSet")


def _vote(dists, neighbor_labels, order_key):
    """Majority label among the neighbours; ties by summed distance, then label order."""
    counts, sums = Counter(), Counter()
    for dist, lab in zip(dists, neighbor_labels):
        counts[lab] += 1
        sums[lab] += float(np.sqrt(dist))
    return min(counts, key=lambda c: (-counts[c], sums[c], order_key[c]))


def _predict(d2, train_labels, knn_k, order_key):
    """Predicted label per row of the squared-distance matrix ``d2``."""
    k = min(knn_k, d2.shape[1])
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
    if k == 1:
        return [train_labels[j] for j in nearest[:, 0]]
    return [
        _vote(d2[i, idx], [train_labels[j] for j in idx], order_key)
        for i, idx in enumerate(nearest)
    ]


def build_report(truth, pred, method, metric, dimension):
    classes = sorted(set(truth) | set(pred))
    pos = {c: i for i, c in enumerate(classes)}
    conf = np.zeros((len(classes), len(classes)), dtype=int)
    for t, p in zip(truth, pred):
        conf[pos[t], pos[p]] += 1
    row = conf.sum(axis=1)
    per_class = {
        c: (float(conf[i, i] / row[i]) if row[i] else 0.0) for i, c in enumerate(classes)
    }
    total = int(conf.sum())
    return EvalReport(
        method=method,
        metric=metric,
        dimension=dimension,
        accuracy=float(np.trace(conf) / total) if total else 0.0,
        classes=classes,
        per_class=per_class,
        confusion=conf.tolist(),
        n_items=total,
    )


def _dimension_of(data):
    if isinstance(data, DescriptorSet):
        return f"{data.dim}x{data.dim}"
    return str(data.dim)


def loo_knn_eval(data, metric="lem", knn_k=1, method="knn"):
    """Leave-one-out k-NN recognition rate.

    Each item is predicted by majority vote among its ``knn_k`` nearest other
    items under ``metric``. Vote ties go to the label with the smallest
    summed distance, then to the lexicographically first label.
    """
    metric = check_metric(metric)
    n = len(data)
    if n < 2:
        raise InvalidInput("leave-one-out evaluation needs at least 2 items")
    if knn_k < 1:
        raise InvalidInput(f"knn_k must be >= 1, got {knn_k}")
    start = time.perf_counter()
    X, labels = _points_and_labels(data, metric)
    order_key = {c: i for i, c in enumerate(sorted(set(labels)))}
    d2 = pairwise_sq_distances(X)
    # an item never votes for itself
    np.fill_diagonal(d2, np.inf)
    pred = _predict(d2, labels, min(knn_k, n - 1), order_key)
    report = build_report(labels, pred, method, metric, _dimension_of(data))
    report.wall_time_eval = time.perf_counter() - start
    return report


def split_knn_eval(train, test, metric="lem", knn_k=1, method="knn"):
    """Classify every test item against the training items."""
    metric = check_metric(metric)
    if len(train) < 1 or len(test) < 1:
        raise InvalidInput("train and test sets must be non-empty")
    start = time.perf_counter()
    Xtr, ltr = _points_and_labels(train, metric)
    Xte, lte = _points_and_labels(test, metric)
    order_key = {c: i for i, c in enumerate(sorted(set(ltr) | set(lte)))}
    diff = Xte[:, None, :] - Xtr[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    pred = _predict(d2, ltr, knn_k, order_key)
    report = build_report(lte, pred, method, metric, _dimension_of(test))
    report.wall_time_eval = time.perf_counter() - start
    return report


def train_test_split(labels, train_per_class, rng):
    """Random ``train_per_class`` items per class for training, the rest for testing."""
    by_class = {}
    for i, lab in enumerate(labels):
        by_class.setdefault(str(lab), []).append(i)
    train = []
    for lab in sorted(by_class):
        idx = by_class[lab]
        if len(idx) <= train_per_class:
            raise InvalidInput(
                f"class {lab!r} has {len(idx)} items, need more than {train_per_class}"
            )
        train += sorted(rng.choice(idx, size=train_per_class, replace=False).tolist())
    chosen = set(train)
    return sorted(train), [i for i in range(len(labels)) if i not in chosen]
