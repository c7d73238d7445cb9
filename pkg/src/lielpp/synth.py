"""Seeded synthetic SPD data."""

import zlib

import numpy as np

from .descriptors import DescriptorSet
from .errors import InvalidInput
from .spd import SymMatrix, exp_sym


def stage_rng(seed, stage):
    """Generator for one pipeline stage, derived from ``(seed, stage)``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), zlib.crc32(stage.encode())]))


def random_symmetric(rng, D, normalize=True):
    G = rng.standard_normal((D, D))
    X = 0.5 * (G + G.T)
    if normalize:
        X /= np.linalg.norm(X)
    return X


def synth_spd_clusters(classes, per_class, D, separation, seed=0):
    """Clusters of SPD matrices around log-domain centers.

    Class ``c`` has center ``separation * C_c`` with ``C_c`` a random
    unit-Frobenius symmetric matrix. Each sample is
    ``exp(center + separation / 10 * N)`` with ``N`` a fresh unit-Frobenius
    symmetric matrix.
    """
    if min(classes, per_class, D) < 1:
        raise InvalidInput("classes, per_class and D must be >= 1")
    if separation < 0:
        raise InvalidInput(f"separation must be >= 0, got {separation!r}")
    rng = stage_rng(seed, "synth")
    sigma = separation / 10.0
    centers = [separation * random_symmetric(rng, D) for _ in range(classes)]
    descs, labels, ids = [], [], []
    for c, center in enumerate(centers):
        for i in range(per_class):
            X = center + sigma * random_symmetric(rng, D)
            descs.append(exp_sym(SymMatrix(X, check=False)))
            labels.append(f"class{c}")
            ids.append(f"synth-{c}-{i}")
    return DescriptorSet(descs, labels, ids)
