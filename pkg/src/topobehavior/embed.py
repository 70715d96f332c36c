"""Sliding window (time delay) embeddings of vector-valued time series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .ingest import Patch, TimeSeries


@dataclass(frozen=True)
class PointCloud:
    """A finite set of points in Euclidean space.

    points: (n_points, dim) float array. ``provenance`` optionally records
    (parent sample id, window length) for embeddings.
    """

    points: np.ndarray
    provenance: tuple[str, int] | None = None

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2:
            raise DataError(f"points must be 2-dimensional, got shape {pts.shape}")
        if pts.shape[0] == 0:
            raise DataError("point cloud must be non-empty")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]


def sliding_window(ts: TimeSeries | Patch | np.ndarray, w: int) -> PointCloud:
    """Embed a series as the sequence of concatenations of w consecutive frames.

    Point t is ``[x_t x_{t+1} ... x_{t+w-1}]``, so a d-dimensional series of
    length N maps to N - w + 1 points of dimension d*w. The step between
    windows is one frame.
    """
    if isinstance(ts, np.ndarray):
        frames = np.asarray(ts, dtype=np.float64)
        if frames.ndim == 1:
            frames = frames[:, None]
        if frames.ndim != 2:
            raise DataError(f"expected a 1- or 2-dimensional array, got shape {ts.shape}")
        parent = "array"
    else:
        frames = ts.frames
        parent = getattr(ts, "sample_id", None) or getattr(ts, "parent_id", "series")
    n, d = frames.shape
    if w <= 0:
        raise ConfigError(f"window length must be positive, got {w}")
    if w > n:
        raise DataError(f"window length {w} exceeds series length {n}")
    view = np.lib.stride_tricks.sliding_window_view(frames, (w, d))
    points = view.reshape(n - w + 1, w * d).copy()
    return PointCloud(points=points, provenance=(parent, w))
