"""Corpus pipeline and single-recording case study.

``run_pipeline`` drives posture recordings through patching, sliding-window
embedding, Vietoris-Rips persistence, landscape discretization and averaging,
and the corpus-level comparisons (class distance table, MDS, PCA, coordinate
spreads, permutation tests, SVM cross-validation, SVR estimates), writing
every intermediate artifact plus SVG plots into an output tree.

Outputs are a pure function of (config, inputs): all randomness is derived
from the config seed through named streams, rows are written in sorted
deterministic order, and floats are serialized with ``repr`` so files
round-trip bit-exactly. Each artifact is stamped with a hash of the
parameters that determine its content, so re-running one stage from the
written intermediates (e.g. via the CLI) reproduces the same file.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, fields
from itertools import combinations
from pathlib import Path

import numpy as np

from .embed import sliding_window
from .errors import ConfigError, DataError, NumericalError
from .homology import (
    PersistenceDiagram,
    pairwise_distances,
    persistent_homology,
    representative_cycles,
    vietoris_rips,
)
from .ingest import Patch, TimeSeries, make_patches, save_postures
from .landscape import (
    ClassSummary,
    DiscretizedLandscape,
    Grid,
    average_landscapes,
    discretize,
    landscape_from_diagram,
    normalize_class_distances,
)
from .ml import svm_cross_validate, svr_fit_predict
from .plots import (
    plot_curves,
    plot_diagram,
    plot_landscape,
    plot_scatter,
    plot_strip,
)
from .stats import mds, pca, per_coordinate_std, permutation_test

_ENCLOSING = "enclosing"
_AUTO = "auto"


@dataclass(frozen=True)
class PipelineConfig:
    """All tunables of the corpus pipeline, hashable into a config stamp.

    ``max_radius`` is a float or ``"enclosing"``; ``grid_t_max`` is a float
    or ``"auto"`` (resolved to the largest finite degree-1 death seen in the
    corpus). ``label_targets`` optionally maps class labels to regression
    targets; without it the SVR stage uses each label's 1-based rank in
    sorted label order.
    """

    patch_length: int = 300
    overlap: int = 150
    window_length: int = 20
    max_dim: int = 2
    max_radius: float | str = _ENCLOSING
    grid_t_min: float = 0.0
    grid_t_max: float | str = _AUTO
    grid_size: int = 100
    n_depths: int = 5
    seed: int | None = None
    kernel: str = "rbf"
    svm_c: float = 10.0
    cv_folds: int = 10
    cv_repeats: int = 20
    svr_folds: int = 10
    svr_repeats: int = 10
    svr_epsilon: float = 0.1
    n_perms: int = 999
    significance: float = 0.25
    top_cycles: int = 4
    label_targets: tuple[tuple[str, float], ...] | None = None

    def __post_init__(self):
        if self.patch_length <= 0 or self.window_length <= 0:
            raise ConfigError("patch_length and window_length must be positive")
        if not 0 <= self.overlap < self.patch_length:
            raise ConfigError(
                f"overlap must satisfy 0 <= overlap < patch_length, got {self.overlap}"
            )
        if self.max_dim < 2:
            raise ConfigError("max_dim below 2 cannot support degree-1 persistence")
        if isinstance(self.max_radius, str) and self.max_radius != _ENCLOSING:
            raise ConfigError(f'max_radius must be a number or "{_ENCLOSING}"')
        if isinstance(self.grid_t_max, str) and self.grid_t_max != _AUTO:
            raise ConfigError(f'grid_t_max must be a number or "{_AUTO}"')
        if self.grid_size < 2:
            raise ConfigError("grid_size must be at least 2")
        if self.n_depths < 1:
            raise ConfigError("n_depths must be at least 1")
        if not 0 < self.significance < 1:
            raise ConfigError("significance must lie strictly between 0 and 1")
        if self.top_cycles < 1:
            raise ConfigError("top_cycles must be at least 1")

    def as_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "label_targets" and value is not None:
                value = ";".join(f"{k}:{_fmt(v)}" for k, v in value)
            lines.append(f"{f.name}={_fmt(value)}")
        return "\n".join(lines) + "\n"

    def stamp(self) -> str:
        return _hash_text(self.as_text())

    @classmethod
    def from_mapping(cls, mapping: dict) -> "PipelineConfig":
        kwargs = {}
        valid = {f.name: f for f in fields(cls)}
        for key, raw in mapping.items():
            if key not in valid:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(key, raw)
        return cls(**kwargs)


_INT_KEYS = {
    "patch_length", "overlap", "window_length", "max_dim", "grid_size",
    "n_depths", "seed", "cv_folds", "cv_repeats", "svr_folds", "svr_repeats",
    "n_perms", "top_cycles",
}
_FLOAT_KEYS = {"grid_t_min", "svm_c", "svr_epsilon", "significance"}


def _coerce(key: str, raw):
    if not isinstance(raw, str):
        return raw
    value = raw.strip()
    if value == "None" and key in ("seed", "label_targets"):
        return None
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key == "max_radius":
            return value if value == _ENCLOSING else float(value)
        if key == "grid_t_max":
            return value if value == _AUTO else float(value)
        if key == "label_targets":
            pairs = []
            for item in value.split(";"):
                label, _, target = item.partition(":")
                if not label or not target:
                    raise ValueError(f"expected label:target, got {item!r}")
                pairs.append((label.strip(), float(target)))
            return tuple(pairs)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from None
    return value


def _fmt(v) -> str:
    if isinstance(v, (bool,)):
        return str(v)
    if isinstance(v, (float, np.floating)):
        if math.isinf(v):
            return "+inf" if v > 0 else "-inf"
        return repr(float(v))
    return str(v)


def _hash_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def _param_stamp(**params) -> str:
    body = "\n".join(f"{k}={_fmt(v)}" for k, v in sorted(params.items()))
    return _hash_text(body)


def _write_csv(path: Path, header: str | None, rows, stamp: str) -> None:
    lines = [f"# config {stamp}"]
    if header:
        lines.append(header)
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def read_matrix(path) -> np.ndarray:
    """Read a comment-tolerant numeric CSV (clouds, vectors, coordinates)."""
    try:
        m = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    if m.size == 0:
        raise DataError(f"{path}: no numeric rows")
    return m


def write_diagram_csv(path, diagrams: dict[int, PersistenceDiagram], stamp: str) -> None:
    rows = []
    for degree in sorted(diagrams):
        for b, d in diagrams[degree].pairs:
            rows.append((degree, b, d))
    _write_csv(Path(path), "degree,birth,death", rows, stamp)


def read_diagram_csv(path, degree: int = 1) -> np.ndarray:
    """Load the (birth, death) pairs of one degree from a diagram CSV."""
    pairs = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("degree"):
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise DataError(f"{path}: expected degree,birth,death rows")
        if int(parts[0]) != degree:
            continue
        death = math.inf if parts[2] in ("+inf", "inf") else float(parts[2])
        pairs.append((float(parts[1]), death))
    return np.array(pairs, dtype=np.float64).reshape(-1, 2)


def write_landscape_csv(path, disc: DiscretizedLandscape, stamp: str) -> None:
    grid = disc.grid
    header = (
        f"t_min={_fmt(grid.t_min)},t_max={_fmt(grid.t_max)},"
        f"size={grid.size},depths={disc.n_depths}"
    )
    _write_csv(Path(path), header, disc.values, stamp)


def read_landscape_csv(path) -> DiscretizedLandscape:
    lines = [
        l for l in Path(path).read_text().splitlines()
        if l.strip() and not l.startswith("#")
    ]
    if not lines:
        raise DataError(f"{path}: empty landscape file")
    meta = {}
    for item in lines[0].split(","):
        key, _, value = item.partition("=")
        meta[key] = value
    try:
        grid = Grid(float(meta["t_min"]), float(meta["t_max"]), int(meta["size"]))
        depths = int(meta["depths"])
    except (KeyError, ValueError) as exc:
        raise DataError(f"{path}: bad landscape header: {exc}") from None
    values = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    if values.shape != (depths, grid.size):
        raise DataError(
            f"{path}: expected {depths} x {grid.size} values, got {values.shape}"
        )
    return DiscretizedLandscape(grid, values)


def _stage(name: str, sample: str | None = None):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, (ConfigError, DataError, NumericalError)):
                where = f"stage '{name}'" + (f", sample '{sample}'" if sample else "")
                raise type(exc)(f"{where}: {exc}") from exc
            return False

    return _Ctx()


def _count_significant(pairs: np.ndarray, threshold: float) -> int:
    if pairs.size == 0:
        return 0
    pers = pairs[:, 1] - pairs[:, 0]
    pers = pers[np.isfinite(pers)]
    if pers.size == 0:
        return 0
    return int(np.sum(pers > threshold * pers.max()))


def _derive_seed(seed: int, *stream: int) -> int:
    return int(np.random.SeedSequence((int(seed),) + stream).generate_state(1)[0])


def _patches_for(ts: TimeSeries, config: PipelineConfig) -> list[Patch]:
    # recordings shorter than one patch are analyzed whole
    if len(ts) < config.patch_length:
        return [
            Patch(
                parent_id=ts.sample_id or "sample",
                start=0,
                frames=ts.frames,
                frame_rate_hz=ts.frame_rate_hz,
            )
        ]
    return make_patches(ts, config.patch_length, config.overlap)


def _diagrams_for_cloud(points: np.ndarray, config: PipelineConfig):
    dm = pairwise_distances(points)
    filtration = vietoris_rips(dm, max_dim=config.max_dim, max_radius=config.max_radius)
    h0, h1 = persistent_homology(filtration, degrees=(0, 1))
    return filtration, h0, h1


def _sample_key(ts: TimeSeries, index: int) -> str:
    return ts.sample_id or f"sample{index:03d}"


def run_pipeline(config: PipelineConfig, inputs: list[TimeSeries], out_dir) -> Path:
    """Run the full corpus pipeline; returns the populated output directory.

    Stage errors re-raise with the stage name and offending sample id
    prepended. Degenerate corpora (one sample, or a single class) skip the
    comparison stages with a notice in ``summary.txt`` instead of failing.
    """
    if not inputs:
        raise DataError("pipeline needs at least one input sample")
    dims = {ts.dim for ts in inputs}
    if len(dims) != 1:
        raise DataError(f"inconsistent posture dimensions across samples: {sorted(dims)}")
    if config.seed is None:
        raise ConfigError(
            "cross-validation, regression, and permutation stages are stochastic; "
            "the config needs a seed"
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stamp = config.stamp()
    (out / "config.txt").write_text(config.as_text() + f"config_hash={stamp}\n")
    notices: list[str] = []

    sample_ids = []
    labels = []
    per_sample_lands: dict[str, list] = {}
    per_sample_dirs: dict[str, Path] = {}
    max_death = 0.0
    patch_stamp = _param_stamp(patch_length=config.patch_length, overlap=config.overlap)
    embed_stamp = _param_stamp(window_length=config.window_length)
    ph_stamp = _param_stamp(max_dim=config.max_dim, max_radius=config.max_radius)
    for index, ts in enumerate(inputs):
        sid = _sample_key(ts, index)
        if sid in per_sample_lands:
            raise DataError(f"duplicate sample id {sid!r}")
        sample_ids.append(sid)
        labels.append(ts.label or "unlabeled")
        sdir = out / "samples" / sid
        sdir.mkdir(parents=True, exist_ok=True)
        per_sample_dirs[sid] = sdir
        with _stage("patch", sid):
            patches = _patches_for(ts, config)
        lands = []
        for p_idx, patch in enumerate(patches):
            pdir = sdir / f"patch{p_idx:02d}"
            pdir.mkdir(exist_ok=True)
            with _stage("embed", sid):
                cloud = sliding_window(patch, config.window_length)
                frames_path = pdir / "frames.csv"
                save_postures(
                    TimeSeries(patch.frames, frame_rate_hz=patch.frame_rate_hz),
                    frames_path,
                )
                frames_path.write_text(
                    f"# config {patch_stamp}\n" + frames_path.read_text()
                )
                _write_csv(pdir / "cloud.csv", None, cloud.points, embed_stamp)
            with _stage("persistence", sid):
                filtration, h0, h1 = _diagrams_for_cloud(cloud.points, config)
                write_diagram_csv(pdir / "diagram.csv", {0: h0, 1: h1}, ph_stamp)
                plot_diagram(
                    np.concatenate([h0.pairs, h1.pairs]),
                    pdir / "diagram.svg",
                    title=f"{sid} patch {p_idx} persistence",
                    config_hash=ph_stamp,
                )
            with _stage("landscape", sid):
                land = landscape_from_diagram(h1, infinity_cap=filtration.max_radius)
                lands.append(land)
            if len(h1.pairs):
                finite = h1.pairs[np.isfinite(h1.pairs[:, 1])]
                if finite.size:
                    max_death = max(max_death, float(finite[:, 1].max()))
        per_sample_lands[sid] = lands

    with _stage("grid"):
        t_max = config.grid_t_max
        if t_max == _AUTO:
            t_max = max_death if max_death > config.grid_t_min else config.grid_t_min + 1.0
        grid = Grid(config.grid_t_min, float(t_max), config.grid_size)
    land_stamp = _param_stamp(
        t_min=grid.t_min, t_max=grid.t_max, size=grid.size, depths=config.n_depths
    )

    vectors = []
    for sid in sample_ids:
        with _stage("landscape", sid):
            discs = [
                discretize(l, grid, config.n_depths) for l in per_sample_lands[sid]
            ]
            for p_idx, disc in enumerate(discs):
                write_landscape_csv(
                    per_sample_dirs[sid] / f"patch{p_idx:02d}" / "landscape.csv",
                    disc,
                    land_stamp,
                )
            avg = average_landscapes(discs)
            write_landscape_csv(per_sample_dirs[sid] / "landscape.csv", avg, land_stamp)
            plot_landscape(
                grid.ts,
                avg.values,
                per_sample_dirs[sid] / "landscape.svg",
                title=f"{sid} average landscape",
                config_hash=land_stamp,
            )
            vectors.append(avg.vector)
    X = np.array(vectors)
    y = np.array(labels)
    class_names = sorted(set(labels))

    corpus = out / "corpus"
    corpus.mkdir(exist_ok=True)
    _write_csv(
        corpus / "landscape_vectors.csv",
        "sample_id,label," + ",".join(f"v{i}" for i in range(X.shape[1])),
        [(sid, lab, *row) for sid, lab, row in zip(sample_ids, labels, X)],
        land_stamp,
    )

    with _stage("class summaries"):
        summaries = []
        for name in class_names:
            members = [i for i, lab in enumerate(labels) if lab == name]
            mean = average_landscapes(
                [DiscretizedLandscape(grid, X[i].reshape(config.n_depths, grid.size)) for i in members]
            )
            summaries.append(
                ClassSummary(
                    label=name,
                    mean=mean,
                    n=len(members),
                    member_ids=tuple(sample_ids[i] for i in members),
                )
            )
            cdir = corpus / "classes" / name
            cdir.mkdir(parents=True, exist_ok=True)
            write_landscape_csv(cdir / "mean_landscape.csv", mean, land_stamp)
            plot_landscape(
                grid.ts,
                mean.values,
                cdir / "mean_landscape.svg",
                title=f"{name} mean landscape (n={len(members)})",
                config_hash=land_stamp,
            )

    with _stage("distance table"):
        dist_labels, dist_matrix = normalize_class_distances(summaries)
        _write_csv(
            corpus / "class_distances.csv",
            "class," + ",".join(dist_labels),
            [(lab, *row) for lab, row in zip(dist_labels, dist_matrix)],
            stamp,
        )

    with _stage("mds"):
        n = len(sample_ids)
        dm = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                dm[i, j] = dm[j, i] = float(np.linalg.norm(X[i] - X[j]))
        embedding = mds(dm, target_dim=2) if n >= 2 else None
        if embedding is not None:
            _write_csv(
                corpus / "mds.csv",
                "sample_id,label,x,y,stress",
                [
                    (sid, lab, c[0], c[1] if len(c) > 1 else 0.0, embedding.stress)
                    for sid, lab, c in zip(sample_ids, labels, embedding.coordinates)
                ],
                stamp,
            )
            plot_scatter(
                embedding.coordinates,
                labels,
                corpus / "mds.svg",
                title=f"MDS of landscape distances (stress {embedding.stress:.3g})",
                config_hash=stamp,
            )
        else:
            notices.append("mds: skipped (single sample)")

    with _stage("pca"):
        if len(sample_ids) >= 2 and np.any(X.std(axis=0) > 0):
            k = min(len(sample_ids) - 1, X.shape[1], 10)
            corpus_pca = pca(X, k)
            coords = corpus_pca.project(X)[:, :2]
            if coords.shape[1] < 2:
                coords = np.c_[coords, np.zeros(len(coords))]
            _write_csv(
                corpus / "pca.csv",
                "sample_id,label,pc1,pc2",
                [(sid, lab, c[0], c[1]) for sid, lab, c in zip(sample_ids, labels, coords)],
                stamp,
            )
            _write_csv(
                corpus / "pca_variance.csv",
                "component,explained_variance,cumulative_fraction",
                [
                    (i + 1, v, c)
                    for i, (v, c) in enumerate(
                        zip(corpus_pca.explained_variance, corpus_pca.cumulative)
                    )
                ],
                stamp,
            )
            plot_scatter(
                coords,
                labels,
                corpus / "pca.svg",
                title="corpus PCA of landscape vectors",
                x_label="PC1",
                y_label="PC2",
                config_hash=stamp,
            )
            class_rows = []
            for s in summaries:
                members = [i for i, lab in enumerate(labels) if lab == s.label]
                if len(members) < 2:
                    continue
                sub = X[members]
                if not np.any(sub.std(axis=0) > 0):
                    continue
                kc = min(len(members) - 1, sub.shape[1], 10)
                res = pca(sub, kc)
                for i, (v, c) in enumerate(zip(res.explained_variance, res.cumulative)):
                    class_rows.append((s.label, i + 1, v, c))
            _write_csv(
                corpus / "class_pca_variance.csv",
                "class,component,explained_variance,cumulative_fraction",
                class_rows,
                stamp,
            )
        else:
            notices.append("pca: skipped (needs two samples with variation)")

    with _stage("coordinate spread"):
        spread_rows = []
        for s in summaries:
            members = [i for i, lab in enumerate(labels) if lab == s.label]
            if len(members) >= 2:
                spread_rows.append((s.label, per_coordinate_std(X[members])))
        if spread_rows:
            _write_csv(
                corpus / "class_std.csv",
                "class," + ",".join(f"v{i}" for i in range(X.shape[1])),
                [(name, *vec) for name, vec in spread_rows],
                stamp,
            )
            plot_curves(
                np.array([vec for _, vec in spread_rows]),
                [name for name, _ in spread_rows],
                corpus / "class_std.svg",
                title="per-coordinate landscape spread by class",
                config_hash=stamp,
            )
        else:
            notices.append("coordinate spread: skipped (no class has two samples)")

    with _stage("permutation tests"):
        if len(class_names) >= 2:
            rows = []
            for i, j in combinations(range(len(class_names)), 2):
                a, b = class_names[i], class_names[j]
                res = permutation_test(
                    X[y == a],
                    X[y == b],
                    n_perms=config.n_perms,
                    seed=_derive_seed(config.seed, 301, i, j),
                )
                rows.append((a, b, res.observed, res.p_value, res.n_perms))
            _write_csv(
                corpus / "permutation_tests.csv",
                "class_a,class_b,observed,p_value,n_perms",
                rows,
                stamp,
            )
        else:
            notices.append("permutation tests: skipped (needs two classes)")

    with _stage("svm"):
        if len(class_names) >= 2 and len(sample_ids) >= 2:
            folds = min(config.cv_folds, len(sample_ids))
            if folds < config.cv_folds:
                notices.append(f"svm: folds clamped to sample count {folds}")
            report = svm_cross_validate(
                X,
                y,
                folds=folds,
                repeats=config.cv_repeats,
                seed=_derive_seed(config.seed, 201),
                kernel=config.kernel,
                C=config.svm_c,
            )
            _write_csv(
                corpus / "svm_confusion.csv",
                "truth\\predicted," + ",".join(str(c) for c in report.classes),
                [
                    (str(c), *row)
                    for c, row in zip(report.classes, report.confusion)
                ],
                stamp,
            )
            (corpus / "svm_report.txt").write_text(
                f"# config {stamp}\n"
                f"accuracy_mean={_fmt(report.accuracy_mean)}\n"
                f"per_repeat={','.join(_fmt(v) for v in report.per_repeat)}\n"
                f"folds={folds}\nrepeats={config.cv_repeats}\n"
            )
        else:
            notices.append("svm: skipped (needs two classes and two samples)")

    with _stage("svr"):
        if len(sample_ids) >= 2 and len(class_names) >= 2:
            target_of = (
                dict(config.label_targets)
                if config.label_targets is not None
                else {name: float(rank) for rank, name in enumerate(class_names, start=1)}
            )
            missing = [lab for lab in class_names if lab not in target_of]
            if missing:
                raise ConfigError(f"label_targets missing classes: {missing}")
            targets = np.array([target_of[lab] for lab in labels])
            estimates = svr_fit_predict(
                X,
                targets,
                folds=min(config.svr_folds, len(sample_ids)),
                repeats=config.svr_repeats,
                seed=_derive_seed(config.seed, 202),
                kernel=config.kernel,
                C=config.svm_c,
                epsilon=config.svr_epsilon,
            )
            _write_csv(
                corpus / "svr_estimates.csv",
                "sample_id,label,target,estimate",
                list(zip(sample_ids, labels, targets, estimates)),
                stamp,
            )
            groups = {
                name: [estimates[i] for i, lab in enumerate(labels) if lab == name]
                for name in class_names
            }
            plot_strip(
                groups,
                corpus / "svr_estimates.svg",
                title="held-out SVR estimates by class",
                config_hash=stamp,
            )
        else:
            notices.append("svr: skipped (needs two classes and two samples)")

    summary = [
        f"config_hash={stamp}",
        f"samples={len(sample_ids)}",
        f"classes={','.join(class_names)}",
        f"grid=[{_fmt(grid.t_min)},{_fmt(grid.t_max)}] size={grid.size} depths={config.n_depths}",
    ]
    summary += [f"notice: {n}" for n in notices]
    (out / "summary.txt").write_text("\n".join(summary) + "\n")
    return out


def case_study(config: PipelineConfig, ts: TimeSeries, out_dir) -> Path:
    """Side-by-side analysis of one recording and its window embedding.

    Writes, for both the raw frame cloud and the sliding-window embedding:
    the 2-d PCA projection, the degree-0/1 persistence diagrams, and the
    landscape on a shared grid; plus the top representative cycles of the
    embedded diagram with the frame ranges they cover, and a summary that
    counts significant loops (persistence above ``significance`` times the
    maximum) on both sides.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stamp = config.stamp()
    (out / "config.txt").write_text(config.as_text() + f"config_hash={stamp}\n")
    sid = ts.sample_id or "sample"

    with _stage("embed", sid):
        embedded = sliding_window(ts, config.window_length)
    sides = [
        ("raw", ts.frames),
        ("embedded", embedded.points),
    ]
    results = {}
    max_death = 0.0
    ph_stamp = _param_stamp(max_dim=config.max_dim, max_radius=config.max_radius)
    for name, points in sides:
        sdir = out / name
        sdir.mkdir(exist_ok=True)
        with _stage(f"{name} persistence", sid):
            filtration, h0, h1 = _diagrams_for_cloud(points, config)
            write_diagram_csv(sdir / "diagram.csv", {0: h0, 1: h1}, ph_stamp)
            plot_diagram(
                np.concatenate([h0.pairs, h1.pairs]),
                sdir / "diagram.svg",
                title=f"{name} persistence",
                config_hash=ph_stamp,
            )
        with _stage(f"{name} pca", sid):
            if np.any(points.std(axis=0) > 0):
                k = min(len(points) - 1, points.shape[1], 2)
                coords = pca(points, k).project(points)
                if coords.shape[1] < 2:
                    coords = np.c_[coords, np.zeros(len(coords))]
                _write_csv(
                    sdir / "pca.csv",
                    "pc1,pc2",
                    [tuple(c) for c in coords],
                    stamp,
                )
                plot_scatter(
                    coords,
                    None,
                    sdir / "pca.svg",
                    title=f"{name} cloud, first two principal components",
                    x_label="PC1",
                    y_label="PC2",
                    config_hash=stamp,
                )
        results[name] = (filtration, h1, sdir)
        finite = h1.pairs[np.isfinite(h1.pairs[:, 1])] if h1.pairs.size else h1.pairs
        if finite.size:
            max_death = max(max_death, float(finite[:, 1].max()))

    with _stage("grid", sid):
        t_max = config.grid_t_max
        if t_max == _AUTO:
            t_max = max_death if max_death > config.grid_t_min else config.grid_t_min + 1.0
        grid = Grid(config.grid_t_min, float(t_max), config.grid_size)
    land_stamp = _param_stamp(
        t_min=grid.t_min, t_max=grid.t_max, size=grid.size, depths=config.n_depths
    )
    counts = {}
    for name in ("raw", "embedded"):
        filtration, h1, sdir = results[name]
        with _stage(f"{name} landscape", sid):
            land = landscape_from_diagram(h1, infinity_cap=filtration.max_radius)
            disc = discretize(land, grid, config.n_depths)
            write_landscape_csv(sdir / "landscape.csv", disc, land_stamp)
            plot_landscape(
                grid.ts,
                disc.values,
                sdir / "landscape.svg",
                title=f"{name} landscape",
                config_hash=land_stamp,
            )
        counts[name] = _count_significant(h1.pairs, config.significance)

    with _stage("representative cycles", sid):
        filtration, h1, _ = results["embedded"]
        cycles = representative_cycles(
            filtration, h1, top_k=min(config.top_cycles, max(len(h1.pairs), 1))
        ) if len(h1.pairs) else []
        rows = []
        for rank, cyc in enumerate(cycles, start=1):
            verts = cyc.vertices
            first, last = min(verts), max(verts) + config.window_length - 1
            rows.append(
                (
                    rank,
                    cyc.pair[0],
                    cyc.pair[1],
                    first,
                    last,
                    " ".join(str(v) for v in verts),
                )
            )
        _write_csv(
            out / "cycles.csv",
            "rank,birth,death,first_frame,last_frame,window_starts",
            rows,
            stamp,
        )

    (out / "summary.txt").write_text(
        f"config_hash={stamp}\n"
        f"sample={sid}\n"
        f"raw_significant={counts['raw']}\n"
        f"embedded_significant={counts['embedded']}\n"
        f"significance_threshold={_fmt(config.significance)}\n"
    )
    return out
