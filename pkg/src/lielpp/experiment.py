"""Experiment orchestration: data -> descriptors -> reduction -> k-NN evaluation."""

import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import __version__
from .descriptors import sequence_descriptors
from .errors import InvalidInput
from .evaluation import VectorSet, loo_knn_eval, split_knn_eval, train_test_split
from .graph import check_metric
from .io import dumps, input_kind, load_descriptor_set, load_sequences, write_atomic
from .reducers import (
    lie_lpp_fit,
    lie_lpp_transform_set,
    lpp_fit,
    lpp_transform,
    vectorize_sym,
)
from .synth import stage_rng, synth_spd_clusters

REDUCERS = ("lie-lpp", "lpp", "none")


def _descriptor_defaults():
    return {"mode": "window", "T": 20, "overlap": 10, "center": True}


@dataclass
class ExperimentConfig:
    """All knobs of one run.

    Exactly one of ``input`` (manifest or descriptor JSON) and ``synthetic``
    (``{"classes", "per_class", "D", "separation"}``) is set. ``dim`` is the
    reduced SPD size; the vector LPP baseline reduces to ``dim*(dim+1)/2``
    coordinates so both keep the same number of free parameters.
    """

    input: str | None = None
    synthetic: dict | None = None
    descriptor: dict = field(default_factory=_descriptor_defaults)
    reducer: str = "lie-lpp"
    metric: str = "lem"
    k: int = 5
    t: float | str = "auto"
    dim: int = 3
    knn_classify_k: int = 1
    seed: int = 0
    output: str | None = None
    split: dict | None = None

    @classmethod
    def from_dict(cls, obj):
        if not isinstance(obj, dict):
            raise InvalidInput("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(obj) - known)
        if unknown:
            raise InvalidInput(f"unknown config keys: {unknown}")
        cfg = cls(**obj)
        cfg.validate()
        return cfg

    def to_dict(self):
        return asdict(self)

    def validate(self):
        if (self.input is None) == (self.synthetic is None):
            raise InvalidInput("config needs exactly one of 'input' or 'synthetic'")
        self.metric = check_metric(self.metric)
        if self.reducer not in REDUCERS:
            raise InvalidInput(f"reducer must be one of {REDUCERS}, got {self.reducer!r}")
        for name in ("k", "dim", "knn_classify_k"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise InvalidInput(f"{name} must be a positive integer, got {v!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise InvalidInput(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.t != "auto":
            try:
                self.t = float(self.t)
            except (TypeError, ValueError):
                raise InvalidInput(f"t must be a number or 'auto', got {self.t!r}") from None
            if not self.t > 0:
                raise InvalidInput(f"t must be > 0, got {self.t!r}")
        desc = _descriptor_defaults()
        desc.update(self.descriptor or {})
        if desc["mode"] not in ("window", "sequence"):
            raise InvalidInput(f"descriptor mode must be 'window' or 'sequence', got {desc['mode']!r}")
        if not (isinstance(desc["T"], int) and desc["T"] >= 2):
            raise InvalidInput(f"descriptor T must be an integer >= 2, got {desc['T']!r}")
        if not (isinstance(desc["overlap"], int) and 0 <= desc["overlap"] < desc["T"]):
            raise InvalidInput(f"descriptor overlap must be in [0, T), got {desc['overlap']!r}")
        self.descriptor = desc
        if self.synthetic is not None:
            syn = self.synthetic
            try:
                for key in ("classes", "per_class", "D"):
                    if int(syn[key]) < 1:
                        raise InvalidInput(f"synthetic.{key} must be >= 1")
                if float(syn["separation"]) < 0:
                    raise InvalidInput("synthetic.separation must be >= 0")
            except (KeyError, TypeError, ValueError) as exc:
                raise InvalidInput(f"bad synthetic settings: {exc}") from None
            self.check_dim(int(syn["D"]))
        if self.split is not None:
            p = self.split.get("train_per_class") if isinstance(self.split, dict) else None
            if isinstance(p, bool) or not isinstance(p, int) or p < 1:
                raise InvalidInput("split.train_per_class must be a positive integer")

    def check_dim(self, D):
        if self.reducer != "none" and self.dim >= D:
            raise InvalidInput(f"target dim {self.dim} must be smaller than descriptor size {D}")


def load_data(cfg):
    """Descriptors for the config: synthetic, from a descriptor file, or from a manifest."""
    if cfg.synthetic is not None:
        s = cfg.synthetic
        return synth_spd_clusters(
            int(s["classes"]), int(s["per_class"]), int(s["D"]), float(s["separation"]), cfg.seed
        )
    if input_kind(cfg.input) == "descriptors":
        return load_descriptor_set(cfg.input)
    desc = cfg.descriptor
    seqs = load_sequences(cfg.input)
    if not seqs:
        raise InvalidInput(f"{cfg.input}: manifest lists no sequences")
    return sequence_descriptors(
        seqs, mode=desc["mode"], T=desc["T"], overlap=desc["overlap"], center=desc["center"]
    )


def _method_name(cfg):
    if cfg.reducer == "lie-lpp":
        return f"Lie-LPP-{cfg.metric.upper()}"
    if cfg.reducer == "lpp":
        return "LPP"
    return f"{cfg.metric.upper()}-unreduced"


def _fit(cfg, train):
    """Fit the configured reducer; returns (map or None, apply function)."""
    if cfg.reducer == "lie-lpp":
        pmap = lie_lpp_fit(train, k=cfg.k, t=cfg.t, d=cfg.dim, metric=cfg.metric)
        return pmap, lambda data: lie_lpp_transform_set(pmap, data)
    if cfg.reducer == "lpp":

        def vectors(data):
            stack = data.logs() if cfg.metric == "lem" else data.entries()
            return vectorize_sym(stack)

        lmap = lpp_fit(vectors(train), k=cfg.k, t=cfg.t, d=cfg.dim * (cfg.dim + 1) // 2)
        return lmap, lambda data: VectorSet(
            lpp_transform(lmap, vectors(data)), list(data.labels), list(data.source_ids)
        )
    return None, lambda data: data


def run_experiment(cfg, write=True):
    """Run one experiment and return ``(EvalReport, fitted map or None)``.

    When ``write`` is set and ``cfg.output`` names a directory, writes
    ``report.json``, ``report.txt`` and (for Lie-LPP) ``projection.json``
    there. Files are only written after every stage has succeeded.
    """
    if not isinstance(cfg, ExperimentConfig):
        cfg = ExperimentConfig.from_dict(cfg)
    else:
        cfg.validate()
    data = load_data(cfg)
    if len(data) < 2:
        raise InvalidInput("need at least 2 descriptors")
    cfg.check_dim(data.dim)

    if cfg.split is not None:
        rng = stage_rng(cfg.seed, "split")
        tr, te = train_test_split(data.labels, cfg.split["train_per_class"], rng)
        train, test = data.subset(tr), data.subset(te)
    else:
        train, test = data, None

    start = time.perf_counter()
    fitted, apply = _fit(cfg, train)
    reduced_train = apply(train)
    reduced_test = apply(test) if test is not None else None
    fit_time = time.perf_counter() - start

    eval_metric = "em" if cfg.reducer == "lpp" else cfg.metric
    method = _method_name(cfg)
    if test is None:
        report = loo_knn_eval(reduced_train, eval_metric, cfg.knn_classify_k, method)
    else:
        report = split_knn_eval(reduced_train, reduced_test, eval_metric, cfg.knn_classify_k, method)
    report.wall_time_fit = fit_time if fitted is not None else 0.0
    report.config = cfg.to_dict()
    report.version = __version__

    if write and cfg.output:
        out = Path(cfg.output)
        write_atomic(out / "report.json", dumps(report.to_dict()))
        write_atomic(out / "report.txt", report.table())
        if cfg.reducer == "lie-lpp":
            body = fitted.to_dict()
            body.update(version=__version__, config=cfg.to_dict())
            write_atomic(out / "projection.json", dumps(body))
    return report, fitted

