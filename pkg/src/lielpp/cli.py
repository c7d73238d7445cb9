"""Command-line front end.

Exit codes: 0 success, 2 invalid config or input, 3 numeric failure.
"""

import argparse
import json
import sys
import time

from . import __version__
from .analysis import run_suites
from .errors import DegenerateInput, DomainError, InvalidInput
from .evaluation import loo_knn_eval
from .experiment import ExperimentConfig, load_data, run_experiment
from .io import (
    descriptor_set_to_dict,
    dumps,
    load_descriptor_set,
    load_projection_map,
    read_json,
    write_atomic,
)
from .reducers import lie_lpp_fit, lie_lpp_transform_set
from .synth import synth_spd_clusters

EXIT_INPUT = 2
EXIT_NUMERIC = 3


def _t_value(text):
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--seed", type=int)
    common.add_argument("--metric", choices=["lem", "em"])
    common.add_argument("--k", type=int, help="graph neighbours")
    common.add_argument("--t", type=_t_value, help="heat-kernel bandwidth or 'auto'")
    common.add_argument("--dim", type=int, help="reduced SPD size")
    common.add_argument("--out", help="output path (directory for 'run')")
    common.add_argument("--format", choices=["json", "table"], default="table")

    parser = argparse.ArgumentParser(prog="lielpp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="generate synthetic SPD clusters")
    p.add_argument("--classes", type=int, default=4)
    p.add_argument("--per-class", type=int, default=15)
    p.add_argument("--size", type=int, default=10, help="descriptor size D")
    p.add_argument("--separation", type=float, default=4.0)

    p = sub.add_parser("fit", parents=[common], help="fit a Lie-LPP projection map")
    p.add_argument("--input", help="sequence manifest or descriptor file")

    p = sub.add_parser("transform", parents=[common], help="apply a projection map")
    p.add_argument("--map", required=True, help="projection map JSON")
    p.add_argument("--input", required=True, help="descriptor file")

    p = sub.add_parser("eval", parents=[common], help="leave-one-out k-NN evaluation")
    p.add_argument("--input", help="sequence manifest or descriptor file")
    p.add_argument("--knn-k", type=int, help="classifier neighbours (default 1)")

    p = sub.add_parser("analyze", parents=[common], help="run the theorem-check suites")
    p.add_argument("--trials", type=int, default=200)

    sub.add_parser("run", parents=[common], help="run a full experiment from a config")
    return parser


def make_config(args, **extra):
    obj = read_json(args.config) if args.config else {}
    if not isinstance(obj, dict):
        raise InvalidInput("config must be a JSON object")
    overrides = {
        "seed": args.seed,
        "metric": args.metric,
        "k": args.k,
        "t": args.t,
        "dim": args.dim,
        "output": args.out,
    }
    overrides.update(extra)
    for key, value in overrides.items():
        if value is not None:
            obj[key] = value
    if obj.get("input") is not None:
        obj.pop("synthetic", None)
    return ExperimentConfig.from_dict(obj)


def _emit(args, obj, text=None, path=None):
    body = dumps(obj)
    if path:
        write_atomic(path, body)
    if args.format == "json" or text is None:
        if not path:
            sys.stdout.write(body)
    else:
        sys.stdout.write(text)


def cmd_synth(args):
    data = synth_spd_clusters(
        args.classes, args.per_class, args.size, args.separation, args.seed or 0
    )
    _emit(args, descriptor_set_to_dict(data), path=args.out)


def cmd_fit(args):
    cfg = make_config(args, input=args.input, output=None)
    data = load_data(cfg)
    cfg.check_dim(data.dim)
    pmap = lie_lpp_fit(data, k=cfg.k, t=cfg.t, d=cfg.dim, metric=cfg.metric)
    body = pmap.to_dict()
    body["version"] = __version__
    text = (
        f"Lie-LPP map {pmap.D}x{pmap.D} -> {pmap.d}x{pmap.d} ({pmap.metric_tag}, "
        f"k={pmap.k}, t={pmap.t:.6g})\neigenvalues: {pmap.eigenvalues.tolist()}\n"
    )
    _emit(args, body, text, args.out)


def cmd_transform(args):
    pmap = load_projection_map(args.map)
    data = load_descriptor_set(args.input)
    _emit(args, descriptor_set_to_dict(lie_lpp_transform_set(pmap, data)), path=args.out)


def cmd_eval(args):
    cfg = make_config(args, input=args.input, output=None, reducer="none",
                      knn_classify_k=args.knn_k)
    data = load_data(cfg)
    report = loo_knn_eval(data, cfg.metric, cfg.knn_classify_k, method=f"{cfg.metric.upper()}-knn")
    report.config = cfg.to_dict()
    report.version = __version__
    _emit(args, report.to_dict(), report.table(), args.out)


def cmd_analyze(args):
    start = time.perf_counter()
    summary = run_suites(seed=args.seed or 0, trials=args.trials)
    summary["wall_time"] = time.perf_counter() - start
    lines = []
    ok = True
    for name in ("laplacian_dominance", "reduction_error", "rank_one_equivalence"):
        s = summary[name]
        passed = s["holds"] == s["trials"]
        ok &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'} {name}: {s['holds']}/{s['trials']}")
    _emit(args, summary, "\n".join(lines) + "\n", args.out)
    return 0 if ok else EXIT_NUMERIC


def cmd_run(args):
    cfg = make_config(args)
    report, _ = run_experiment(cfg)
    if args.format == "json":
        sys.stdout.write(dumps(report.to_dict()))
    else:
        sys.stdout.write(report.table())


COMMANDS = {
    "synth": cmd_synth,
    "fit": cmd_fit,
    "transform": cmd_transform,
    "eval": cmd_eval,
    "analyze": cmd_analyze,
    "run": cmd_run,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args) or 0
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, DegenerateInput) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (TypeError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
