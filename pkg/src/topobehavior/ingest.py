"""Posture time-series ingestion: CSV loading, occlusion repair, patching.

A sample is a CSV file with one frame per row and a fixed number of float
columns (angles in radians). Occluded frames are encoded as NaN tokens or
blank fields and are repaired by carrying the most recent complete frame
forward. Optional metadata (label, frame rate) lives in a sidecar
``<name>.meta`` file with ``key=value`` lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, ParseError

DEFAULT_FRAME_RATE_HZ = 30.0


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TimeSeries:
    """An ordered sequence of fixed-dimension real vectors.

    frames: (n_frames, dim) float array, one posture vector per row.
    """

    frames: np.ndarray
    frame_rate_hz: float = DEFAULT_FRAME_RATE_HZ
    label: str | None = None
    sample_id: str | None = None

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 2:
            raise DataError(f"frames must be 2-dimensional, got shape {frames.shape}")
        if frames.shape[0] == 0:
            raise DataError("time series must contain at least one frame")
        if frames.shape[1] == 0:
            raise DataError("frames must have at least one coordinate")
        if not np.all(np.isfinite(frames)):
            raise DataError("time series contains non-finite entries after repair")
        if not (self.frame_rate_hz > 0):
            raise ConfigError(f"frame_rate_hz must be positive, got {self.frame_rate_hz}")
        object.__setattr__(self, "frames", _readonly(frames))

    @property
    def dim(self) -> int:
        return self.frames.shape[1]

    def __len__(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class Patch:
    """A contiguous fixed-length slice of a parent time series."""

    parent_id: str
    start: int
    frames: np.ndarray
    frame_rate_hz: float = DEFAULT_FRAME_RATE_HZ

    def __post_init__(self):
        object.__setattr__(self, "frames", _readonly(np.asarray(self.frames)))

    @property
    def dim(self) -> int:
        return self.frames.shape[1]

    def __len__(self) -> int:
        return self.frames.shape[0]


def _parse_row(tokens: list[str], line_number: int) -> list[float]:
    values = []
    for tok in tokens:
        tok = tok.strip()
        if tok == "":
            values.append(math.nan)
            continue
        try:
            values.append(float(tok))
        except ValueError:
            raise ParseError(f"unparseable token {tok!r}", line_number) from None
    return values


def load_postures(
    path: str | Path,
    dim: int | None = None,
    frame_rate_hz: float | None = None,
    label: str | None = None,
) -> TimeSeries:
    """Load a posture CSV, repairing occluded frames.

    A row with any non-finite or missing entry counts as occluded and is
    replaced by the most recent complete row. A first row that is occluded is
    unrecoverable. If ``dim`` is given, every row must have exactly that many
    columns; otherwise the first data row fixes the arity.

    Sidecar metadata from ``<path>.meta`` (``label=...``, ``frame_rate_hz=...``)
    is applied unless overridden by the keyword arguments.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    meta = read_sidecar(path)
    if frame_rate_hz is None:
        frame_rate_hz = float(meta.get("frame_rate_hz", DEFAULT_FRAME_RATE_HZ))
    if label is None:
        label = meta.get("label")

    rows: list[list[float]] = []
    last_complete: list[float] | None = None
    with open(path, newline="") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split(",")
            if not rows and last_complete is None and _looks_like_header(tokens):
                continue
            values = _parse_row(tokens, line_number)
            if dim is None:
                dim = len(values)
            if len(values) != dim:
                raise ParseError(
                    f"expected {dim} columns, found {len(values)}", line_number
                )
            if all(math.isfinite(v) for v in values):
                last_complete = values
            else:
                if last_complete is None:
                    raise DataError(
                        f"{path.name}: first frame is occluded; nothing to carry forward"
                    )
                values = last_complete
            rows.append(values)
    if not rows:
        raise DataError(f"{path.name}: no data rows")
    return TimeSeries(
        frames=np.array(rows, dtype=np.float64),
        frame_rate_hz=frame_rate_hz,
        label=label,
        sample_id=path.stem,
    )


def _looks_like_header(tokens: list[str]) -> bool:
    for tok in tokens:
        tok = tok.strip()
        if tok == "":
            return False
        try:
            float(tok)
            return False
        except ValueError:
            if tok.lower() in ("nan", "inf", "-inf", "+inf"):
                return False
    return True


def save_postures(ts: TimeSeries, path: str | Path, header: bool = True) -> None:
    """Write a time series in the canonical posture CSV format."""
    path = Path(path)
    with open(path, "w") as fh:
        if header:
            fh.write(",".join(f"angle_{i}" for i in range(ts.dim)) + "\n")
        for row in ts.frames:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    meta = {"frame_rate_hz": ts.frame_rate_hz}
    if ts.label is not None:
        meta["label"] = ts.label
    write_sidecar(path, meta)


def read_sidecar(csv_path: str | Path) -> dict[str, str]:
    meta_path = Path(csv_path).with_suffix(".meta")
    meta: dict[str, str] = {}
    if meta_path.exists():
        for line in meta_path.read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, _, value = line.partition("=")
            meta[key.strip()] = value.strip()
    return meta


def write_sidecar(csv_path: str | Path, meta: dict) -> None:
    meta_path = Path(csv_path).with_suffix(".meta")
    lines = [f"{k}={v}" for k, v in meta.items()]
    meta_path.write_text("\n".join(lines) + "\n")


def make_patches(ts: TimeSeries, patch_length: int, overlap: int = 0) -> list[Patch]:
    """Cut a series into overlapping fixed-length patches.

    Patches start at multiples of ``patch_length - overlap``; a trailing
    remainder shorter than ``patch_length`` is dropped.
    """
    n = len(ts)
    if patch_length <= 0:
        raise ConfigError(f"patch_length must be positive, got {patch_length}")
    if overlap < 0 or overlap >= patch_length:
        raise ConfigError(
            f"overlap must satisfy 0 <= overlap < patch_length, got {overlap}"
        )
    if patch_length > n:
        raise DataError(
            f"patch_length {patch_length} exceeds series length {n}"
        )
    step = patch_length - overlap
    parent = ts.sample_id if ts.sample_id is not None else "series"
    patches = []
    for start in range(0, n - patch_length + 1, step):
        patches.append(
            Patch(
                parent_id=parent,
                start=start,
                frames=ts.frames[start : start + patch_length],
                frame_rate_hz=ts.frame_rate_hz,
            )
        )
    return patches


def project_postures(ts: TimeSeries, k: int) -> TimeSeries:
    """Project frames onto their top-k principal components (eigenpostures).

    Mean-centered coordinates in the leading principal directions of the frame
    set. Components beyond the data rank contribute zero coordinates. Off by
    default in the pipeline; the standard analysis runs on raw angle vectors.
    """
    if k <= 0:
        raise ConfigError(f"k must be positive, got {k}")
    if k > ts.dim:
        raise ConfigError(f"k={k} exceeds frame dimension {ts.dim}")
    if len(ts) < 2:
        raise DataError("projection needs at least 2 frames")
    from .stats import pca

    n_comp = min(k, len(ts) - 1, ts.dim)
    result = pca(ts.frames, n_comp)
    centered = ts.frames - result.mean
    coords = np.zeros((len(ts), k))
    if result.components.shape[0] > 0:
        proj = centered @ result.components.T
        coords[:, : proj.shape[1]] = proj
    return TimeSeries(
        frames=coords,
        frame_rate_hz=ts.frame_rate_hz,
        label=ts.label,
        sample_id=ts.sample_id,
    )
