"""Command-line interface.

One subcommand per stage (synth, embed, ph, landscape, permtest, classify,
regress) plus the two orchestrators (pipeline, case-study). Stage commands
read and write the same CSV formats the pipeline emits, so a pipeline run
can be reproduced piecemeal from its intermediate files.

Exit codes: 0 success, 2 bad parameters or configuration, 3 bad input data,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .embed import sliding_window
from .errors import ConfigError, DataError, NumericalError, ParseError
from .homology import pairwise_distances, persistent_homology, vietoris_rips
from .ingest import load_postures, save_postures
from .landscape import Grid, discretize, landscape_from_diagram
from .ml import svm_cross_validate, svr_fit_predict
from .pipeline import (
    PipelineConfig,
    _fmt,
    _param_stamp,
    _write_csv,
    case_study,
    read_diagram_csv,
    read_matrix,
    run_pipeline,
    write_diagram_csv,
    write_landscape_csv,
)
from .stats import permutation_test
from .synth import SynthSpec


def _parse_kv(pairs: list[str], what: str) -> dict[str, str]:
    mapping = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"{what} must look like key=value, got {item!r}")
        mapping[key.strip()] = value.strip()
    return mapping


def _read_config_file(path) -> dict[str, str]:
    mapping = {}
    for ln, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(f"expected key=value, got {line!r}", ln)
        key = key.strip()
        if key == "config_hash":  # emitted config files carry their own stamp
            continue
        mapping[key] = value.strip()
    return mapping


def _config_from(args) -> PipelineConfig:
    mapping: dict[str, str] = {}
    if args.config:
        if not Path(args.config).exists():
            raise ConfigError(f"no such config file: {args.config}")
        mapping.update(_read_config_file(args.config))
    mapping.update(_parse_kv(args.set or [], "--set"))
    if getattr(args, "seed", None) is not None:
        mapping["seed"] = str(args.seed)
    return PipelineConfig.from_mapping(mapping)


def _coerce_scalar(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            continue
    return value


def _radius_arg(value: str):
    if value == "enclosing":
        return value
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f'max_radius must be a number or "enclosing", got {value!r}') from None


def _read_labels(path) -> list[str]:
    """Labels, one per line; the last comma-separated field of each row."""
    labels = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        labels.append(line.split(",")[-1].strip())
    if not labels:
        raise DataError(f"{path}: no labels")
    return labels


def _cmd_synth(args) -> int:
    params = {k: _coerce_scalar(v) for k, v in _parse_kv(args.param or [], "--param").items()}
    spec = SynthSpec(kind=args.kind, params=params, seed=args.seed)
    result = spec.generate()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    series = result if isinstance(result, list) else [result]
    index_rows = []
    for i, ts in enumerate(series):
        name = ts.sample_id or f"{args.kind}-{i:02d}"
        save_postures(ts, out / f"{name}.csv")
        index_rows.append((name + ".csv", ts.label or ""))
    lines = [f"{fname},{label}" for fname, label in index_rows]
    (out / "index.csv").write_text("\n".join(lines) + "\n")
    print(f"wrote {len(series)} sample(s) to {out}")
    return 0


def _cmd_embed(args) -> int:
    ts = load_postures(args.input)
    cloud = sliding_window(ts, args.window_length)
    _write_csv(
        Path(args.out),
        None,
        cloud.points,
        _param_stamp(window_length=args.window_length),
    )
    print(f"embedded {len(ts)} frames into {cloud.points.shape[0]} points of dimension {cloud.points.shape[1]}")
    return 0


def _cmd_ph(args) -> int:
    points = read_matrix(args.input)
    max_radius = _radius_arg(args.max_radius)
    f = vietoris_rips(pairwise_distances(points), max_dim=args.max_dim, max_radius=max_radius)
    h0, h1 = persistent_homology(f, degrees=(0, 1))
    write_diagram_csv(
        Path(args.out),
        {0: h0, 1: h1},
        _param_stamp(max_dim=args.max_dim, max_radius=max_radius),
    )
    print(f"degree 0: {len(h0)} pairs, degree 1: {len(h1)} pairs (radius cap {f.max_radius:g})")
    return 0


def _cmd_landscape(args) -> int:
    pairs = read_diagram_csv(args.input, degree=args.degree)
    t_max = args.t_max
    if t_max == "auto":
        finite = pairs[np.isfinite(pairs[:, 1]), 1] if pairs.size else np.array([])
        t_max = float(finite.max()) if finite.size else args.t_min + 1.0
    else:
        try:
            t_max = float(t_max)
        except ValueError:
            raise ConfigError(f'--t-max must be a number or "auto", got {t_max!r}') from None
    grid = Grid(args.t_min, t_max, args.grid_size)
    land = landscape_from_diagram(pairs, infinity_cap=args.infinity_cap)
    disc = discretize(land, grid, args.depths)
    write_landscape_csv(
        Path(args.out),
        disc,
        _param_stamp(t_min=grid.t_min, t_max=grid.t_max, size=grid.size, depths=args.depths),
    )
    nonzero = int(np.sum(disc.values.any(axis=1)))
    print(f"landscape on [{grid.t_min:g}, {grid.t_max:g}]: {nonzero} of {args.depths} depths nonzero")
    return 0


def _cmd_pipeline(args) -> int:
    config = _config_from(args)
    inputs = [load_postures(p) for p in args.inputs]
    out = run_pipeline(config, inputs, args.out)
    print(f"pipeline finished: {out}")
    return 0


def _cmd_case_study(args) -> int:
    config = _config_from(args)
    ts = load_postures(args.input)
    out = case_study(config, ts, args.out)
    print((out / "summary.txt").read_text().strip())
    return 0


def _cmd_permtest(args) -> int:
    a = read_matrix(args.a)
    b = read_matrix(args.b)
    res = permutation_test(a, b, n_perms=args.n_perms, seed=args.seed)
    lines = [
        f"observed={_fmt(res.observed)}",
        f"p_value={_fmt(res.p_value)}",
        f"n_perms={res.n_perms}",
    ]
    print("\n".join(lines))
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
    return 0


def _cmd_classify(args) -> int:
    X = read_matrix(args.matrix)
    labels = _read_labels(args.labels)
    if len(labels) != len(X):
        raise DataError(f"{len(X)} rows but {len(labels)} labels")
    report = svm_cross_validate(
        X,
        np.array(labels),
        folds=args.folds,
        repeats=args.repeats,
        seed=args.seed,
        kernel=args.kernel,
        C=args.C,
    )
    print(f"accuracy_mean={_fmt(report.accuracy_mean)}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        stamp = _param_stamp(
            folds=args.folds, repeats=args.repeats, seed=args.seed,
            kernel=args.kernel, C=args.C,
        )
        (out / "report.txt").write_text(
            f"# config {stamp}\n"
            f"accuracy_mean={_fmt(report.accuracy_mean)}\n"
            f"per_repeat={','.join(_fmt(v) for v in report.per_repeat)}\n"
        )
        _write_csv(
            out / "confusion.csv",
            "truth\\predicted," + ",".join(str(c) for c in report.classes),
            [(str(c), *row) for c, row in zip(report.classes, report.confusion)],
            stamp,
        )
    return 0


def _cmd_regress(args) -> int:
    X = read_matrix(args.matrix)
    try:
        targets = np.array([float(t) for t in _read_labels(args.targets)])
    except ValueError as exc:
        raise DataError(f"{args.targets}: {exc}") from None
    if len(targets) != len(X):
        raise DataError(f"{len(X)} rows but {len(targets)} targets")
    estimates = svr_fit_predict(
        X,
        targets,
        folds=args.folds,
        repeats=args.repeats,
        seed=args.seed,
        kernel=args.kernel,
        C=args.C,
        epsilon=args.epsilon,
    )
    stamp = _param_stamp(
        folds=args.folds, repeats=args.repeats, seed=args.seed,
        kernel=args.kernel, C=args.C, epsilon=args.epsilon,
    )
    _write_csv(
        Path(args.out),
        "index,target,estimate",
        [(i, t, e) for i, (t, e) in enumerate(zip(targets, estimates))],
        stamp,
    )
    err = float(np.mean(np.abs(estimates - targets)))
    print(f"mean_absolute_error={_fmt(err)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topobehavior",
        description="Topological summaries of posture time series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic posture recordings")
    p.add_argument("--kind", required=True,
                   choices=["sine", "figure_eight", "posture_class", "composite"])
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="generator parameter, repeatable")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("embed", help="sliding-window embed a posture CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--window-length", type=int, required=True)
    p.add_argument("--out", required=True, help="point-cloud CSV")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("ph", help="persistence diagram of a point-cloud CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--max-dim", type=int, default=2)
    p.add_argument("--max-radius", default="enclosing",
                   help='radius cap, or "enclosing" (default)')
    p.add_argument("--out", required=True, help="diagram CSV")
    p.set_defaults(func=_cmd_ph)

    p = sub.add_parser("landscape", help="discretized landscape of a diagram CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", default="auto",
                   help='grid upper end, or "auto" for the largest finite death')
    p.add_argument("--grid-size", type=int, default=100)
    p.add_argument("--depths", type=int, default=5)
    p.add_argument("--infinity-cap", type=float, default=None,
                   help="truncate infinite deaths at this value (e.g. the radius cap)")
    p.add_argument("--out", required=True, help="landscape CSV")
    p.set_defaults(func=_cmd_landscape)

    for name, fn, multi in (
        ("pipeline", _cmd_pipeline, True),
        ("case-study", _cmd_case_study, False),
    ):
        p = sub.add_parser(
            name,
            help="full corpus analysis" if multi else "raw-vs-embedded study of one recording",
        )
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="config override, repeatable")
        p.add_argument("--seed", type=int, default=None, help="shorthand for --set seed=...")
        p.add_argument("--out", required=True, help="output directory")
        if multi:
            p.add_argument("inputs", nargs="+", help="posture CSV files")
        else:
            p.add_argument("--input", required=True, help="posture CSV file")
        p.set_defaults(func=fn)

    p = sub.add_parser("permtest", help="two-sample permutation test on vector CSVs")
    p.add_argument("--a", required=True, help="first group, one vector per row")
    p.add_argument("--b", required=True, help="second group")
    p.add_argument("--n-perms", type=int, default=999)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None, help="optional report file")
    p.set_defaults(func=_cmd_permtest)

    p = sub.add_parser("classify", help="SVM cross-validation on a feature matrix")
    p.add_argument("--matrix", required=True, help="one feature vector per row")
    p.add_argument("--labels", required=True, help="one label per row")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--kernel", default="rbf", choices=["rbf", "linear"])
    p.add_argument("--C", type=float, default=10.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None, help="optional report directory")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("regress", help="held-out SVR estimates on a feature matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--targets", required=True, help="one numeric target per row")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--kernel", default="rbf", choices=["rbf", "linear"])
    p.add_argument("--C", type=float, default=10.0)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="estimates CSV")
    p.set_defaults(func=_cmd_regress)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
