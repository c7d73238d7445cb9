"""Covariance descriptors from per-frame feature rows."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput
from .spd import SpdMatrix, make_spd


@dataclass(frozen=True, eq=False)
class FeatureSequence:
    """Ordered feature frames, one row per frame."""

    frames: np.ndarray
    label: str | None = None
    id: str = ""

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=float)
        if frames.ndim == 1:
            frames = frames[None, :]
        if frames.ndim != 2 or frames.shape[0] < 1 or frames.shape[1] < 1:
            raise InvalidInput(f"sequence {self.id!r}: frames must be a non-empty 2-D array")
        if not np.all(np.isfinite(frames)):
            raise InvalidInput(f"sequence {self.id!r}: non-finite frame entries")
        frames.flags.writeable = False
        object.__setattr__(self, "frames", frames)

    @property
    def d(self):
        return self.frames.shape[1]

    def __len__(self):
        return self.frames.shape[0]


@dataclass(eq=False)
class DescriptorSet:
    """SPD descriptors with parallel labels and source ids."""

    descriptors: list
    labels: list = field(default_factory=list)
    source_ids: list = field(default_factory=list)

    def __post_init__(self):
        n = len(self.descriptors)
        if not self.labels:
            self.labels = [None] * n
        if not self.source_ids:
            self.source_ids = [str(i) for i in range(n)]
        if len(self.labels) != n or len(self.source_ids) != n:
            raise InvalidInput("descriptors, labels and source_ids differ in length")
        self.descriptors = [
            s if isinstance(s, SpdMatrix) else SpdMatrix(s) for s in self.descriptors
        ]
        if len({s.dim for s in self.descriptors}) > 1:
            raise InvalidInput("descriptors have mixed dimensions")

    @property
    def dim(self):
        return self.descriptors[0].dim if self.descriptors else 0

    def __len__(self):
        return len(self.descriptors)

    def __iter__(self):
        return iter(self.descriptors)

    def logs(self):
        """Stacked matrix logarithms, shape (N, D, D)."""
        # one batched product over the cached eigendecompositions
        lam = np.stack([s.eig.eigenvalues for s in self.descriptors])
        V = np.stack([s.eig.eigenvectors for s in self.descriptors])
        out = (V * np.log(lam)[:, None, :]) @ V.transpose(0, 2, 1)
        return 0.5 * (out + out.transpose(0, 2, 1))

    def entries(self):
        return np.stack([s.entries for s in self.descriptors])

    def subset(self, idx):
        return DescriptorSet(
            [self.descriptors[i] for i in idx],
            [self.labels[i] for i in idx],
            [self.source_ids[i] for i in idx],
        )


def covariance_descriptor(seq, center=True, clamp=True):
    """Covariance ``(1/n) sum f_i f_i^T`` of a sequence's frames.

    With ``center`` the mean frame is removed first. The result goes through
    :func:`make_spd` in clamp or strict mode.
    """
    F = seq.frames if isinstance(seq, FeatureSequence) else FeatureSequence(seq).frames
    if center:
        F = F - F.mean(axis=0)
    C = F.T @ F / F.shape[0]
    return make_spd(C, "clamp" if clamp else "strict")


def window_starts(n_frames, T, overlap):
    """Start offsets of sliding windows; a trailing window of >= 2 frames is kept."""
    stride = T - overlap
    starts = [0]
    while starts[-1] + T < n_frames:
        nxt = starts[-1] + stride
        if n_frames - nxt < 2:
            break
        starts.append(nxt)
    return starts


def window_descriptors(seq, T=20, overlap=10):
    """One centered, clamped covariance descriptor per sliding window.

    Windows of ``T`` frames start every ``T - overlap`` frames; the last
    window may be shorter than ``T`` but has at least two frames. Each
    descriptor keeps the sequence label and gets id ``"<id>#<window>"``.
    """
    if T < 2 or not 0 <= overlap < T:
        raise InvalidInput(f"need T >= 2 and 0 <= overlap < T, got T={T}, overlap={overlap}")
    if len(seq) < 2:
        raise InvalidInput(f"sequence {seq.id!r} has fewer than 2 frames")
    descs, labels, ids = [], [], []
    for w, start in enumerate(window_starts(len(seq), T, overlap)):
        chunk = FeatureSequence(seq.frames[start : start + T], seq.label, seq.id)
        descs.append(covariance_descriptor(chunk, center=True, clamp=True))
        labels.append(seq.label)
        ids.append(f"{seq.id}#{w}")
    return DescriptorSet(descs, labels, ids)


def sequence_descriptors(seqs, mode="window", T=20, overlap=10, center=True, clamp=True):
    """Descriptors for many sequences, ordered by (sequence, window).

    ``mode="window"`` emits one descriptor per window; ``mode="sequence"``
    one covariance over all frames of each sequence.
    """
    descs, labels, ids = [], [], []
    for seq in seqs:
        if mode == "window":
            part = window_descriptors(seq, T, overlap)
            descs += part.descriptors
            labels += part.labels
            ids += part.source_ids
        elif mode == "sequence":
            descs.append(covariance_descriptor(seq, center=center, clamp=clamp))
            labels.append(seq.label)
            ids.append(seq.id)
        else:
            raise InvalidInput(f"unknown descriptor mode {mode!r}")
    return DescriptorSet(descs, labels, ids)
