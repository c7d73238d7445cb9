"""File formats: sequence manifests, CSV frames, descriptor sets and maps."""

import csv
import json
import os
from pathlib import Path

import numpy as np

from .descriptors import DescriptorSet, FeatureSequence
from .errors import IngestError, InvalidInput
from .reducers import ProjectionMap

DESCRIPTOR_FORMAT = "lielpp-descriptors"


def read_json(path):
    path = Path(path)
    try:
        with path.open() as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise IngestError("file not found", path) from None
    except json.JSONDecodeError as exc:
        raise IngestError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def read_frames(path):
    """Parse a frame CSV: one frame per row, optional ``#`` header/comment lines."""
    path = Path(path)
    rows, width = [], None
    try:
        fh = path.open(newline="")
    except FileNotFoundError:
        raise IngestError("file not found", path) from None
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                bad = next(c for c in row if not _is_float(c))
                raise IngestError(f"non-numeric cell {bad.strip()!r}", path, lineno) from None
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise IngestError(
                    f"ragged row: {len(values)} columns, expected {width}", path, lineno
                )
            if not all(np.isfinite(values)):
                raise IngestError("non-finite value", path, lineno)
            rows.append(values)
    if not rows:
        raise IngestError("no frames", path)
    return np.asarray(rows, dtype=float)


def _is_float(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_sequences(path):
    """Load the sequences listed in a JSON manifest.

    The manifest is ``{"sequences": [{"id", "label", "csv"}, ...]}``; CSV
    paths are resolved relative to the manifest. Every sequence must have
    the same feature dimension.
    """
    path = Path(path)
    manifest = read_json(path)
    entries = manifest.get("sequences") if isinstance(manifest, dict) else None
    if not isinstance(entries, list):
        raise IngestError("manifest must contain a 'sequences' list", path)
    seqs, d = [], None
    for n, entry in enumerate(entries):
        csv_name = entry.get("csv", entry.get("csv_path")) if isinstance(entry, dict) else None
        if csv_name is None:
            raise IngestError(f"sequence entry {n} has no 'csv'", path)
        csv_path = path.parent / csv_name
        frames = read_frames(csv_path)
        if d is None:
            d = frames.shape[1]
        elif frames.shape[1] != d:
            raise IngestError(f"{frames.shape[1]} columns, other sequences have {d}", csv_path)
        label = entry.get("label")
        seqs.append(
            FeatureSequence(
                frames,
                None if label is None else str(label),
                str(entry.get("id", csv_name)),
            )
        )
    return seqs


def descriptor_set_to_dict(data):
    return {
        "format": DESCRIPTOR_FORMAT,
        "D": data.dim,
        "descriptors": [
            {"id": i, "label": lab, "matrix": s.entries.tolist()}
            for s, lab, i in zip(data.descriptors, data.labels, data.source_ids)
        ],
    }


def descriptor_set_from_dict(obj, path=None):
    try:
        items = obj["descriptors"]
        return DescriptorSet(
            [np.asarray(it["matrix"], dtype=float) for it in items],
            [it.get("label") for it in items],
            [str(it.get("id", n)) for n, it in enumerate(items)],
        )
    except (KeyError, TypeError) as exc:
        raise IngestError(f"malformed descriptor file ({exc})", path) from None
    except InvalidInput as exc:
        raise IngestError(str(exc), path) from None


def save_descriptor_set(data, path):
    write_atomic(path, dumps(descriptor_set_to_dict(data)))


def load_descriptor_set(path):
    return descriptor_set_from_dict(read_json(path), path)


def save_projection_map(pmap, path, extra=None):
    obj = pmap.to_dict()
    if extra:
        obj.update(extra)
    write_atomic(path, dumps(obj))


def load_projection_map(path):
    obj = read_json(path)
    try:
        return ProjectionMap.from_dict(obj)
    except (KeyError, TypeError) as exc:
        raise IngestError(f"malformed projection map ({exc})", path) from None
    except InvalidInput as exc:
        raise IngestError(str(exc), path) from None


def input_kind(path):
    """``"manifest"`` or ``"descriptors"`` depending on the JSON's top-level keys."""
    obj = read_json(path)
    if isinstance(obj, dict) and "sequences" in obj:
        return "manifest"
    if isinstance(obj, dict) and "descriptors" in obj:
        return "descriptors"
    raise IngestError("neither a sequence manifest nor a descriptor file", path)
