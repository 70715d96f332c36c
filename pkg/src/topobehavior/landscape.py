"""Persistence landscapes: exact construction, discretization, averaging.

The landscape of a diagram is the sequence lambda_1 >= lambda_2 >= ... where
lambda_k(t) is the k-th largest tent value f_{b,d}(t) = max(0, min(t - b,
d - t)) over the diagram's pairs. Construction uses the sweep of Bubenik &
Dlotko: pairs sorted by (birth asc, death desc) are consumed front to back,
and when a tent is cut by a longer-living successor the dominated remainder
is pushed back into the queue for the next depth. The result is exact
(piecewise-linear critical points, no grid).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, DataError, NumericalError
from .homology import PersistenceDiagram


@dataclass(frozen=True)
class Landscape:
    """Exact piecewise-linear landscape; ``depths[k]`` = (ts, values) arrays."""

    depths: tuple[tuple[np.ndarray, np.ndarray], ...]

    def __post_init__(self):
        clean = []
        for xs, ys in self.depths:
            xs = np.ascontiguousarray(xs, dtype=np.float64)
            ys = np.ascontiguousarray(ys, dtype=np.float64)
            if xs.shape != ys.shape or xs.ndim != 1:
                raise DataError("landscape depth must be matching 1-d (t, value) arrays")
            if xs.size:
                if np.any(np.diff(xs) <= 0):
                    raise DataError("landscape breakpoints must be strictly increasing")
                if ys[0] != 0.0 or ys[-1] != 0.0 or np.any(ys < 0.0):
                    raise DataError("landscape depths must be non-negative with zero endpoints")
            xs.setflags(write=False)
            ys.setflags(write=False)
            clean.append((xs, ys))
        object.__setattr__(self, "depths", tuple(clean))

    @property
    def n_depths(self) -> int:
        return len(self.depths)

    def evaluate(self, k: int, ts) -> np.ndarray:
        """Sample lambda_{k+1} (0-based ``k``) at ``ts``; zero outside support."""
        ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
        if k < 0:
            raise ConfigError(f"depth index must be non-negative, got {k}")
        if k >= len(self.depths) or self.depths[k][0].size == 0:
            return np.zeros(ts.shape)
        xs, ys = self.depths[k]
        return np.interp(ts, xs, ys, left=0.0, right=0.0)


@dataclass(frozen=True)
class Grid:
    """Uniform evaluation grid [t_min, t_max] with ``size`` samples."""

    t_min: float
    t_max: float
    size: int

    def __post_init__(self):
        if not (np.isfinite(self.t_min) and np.isfinite(self.t_max)):
            raise ConfigError("grid endpoints must be finite")
        if not self.t_min < self.t_max:
            raise ConfigError(
                f"grid needs t_min < t_max, got [{self.t_min}, {self.t_max}]"
            )
        if self.size < 2:
            raise ConfigError(f"grid needs at least 2 samples, got {self.size}")

    @property
    def ts(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.size)


@dataclass(frozen=True)
class DiscretizedLandscape:
    """A landscape sampled on a grid: K rows (depths) by G columns."""

    grid: Grid
    values: np.ndarray  # (K, G)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != self.grid.size:
            raise DataError(
                f"values must be (K, {self.grid.size}), got shape {v.shape}"
            )
        if np.any(v < 0.0):
            raise DataError("discretized landscape must be non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_depths(self) -> int:
        return self.values.shape[0]

    @property
    def vector(self) -> np.ndarray:
        """Row-major flattening: depth 0's samples, then depth 1's, ..."""
        return self.values.ravel()


@dataclass(frozen=True)
class ClassSummary:
    """Per-class mean discretized landscape with membership bookkeeping."""

    label: str
    mean: DiscretizedLandscape
    n: int
    member_ids: tuple[str, ...] = ()


def _finite_pairs(d, infinity_cap, drop_essential):
    if isinstance(d, PersistenceDiagram):
        pairs = d.pairs
    else:
        pairs = np.asarray(d, dtype=np.float64).reshape(-1, 2)
    if pairs.size == 0:
        return []
    infinite = ~np.isfinite(pairs[:, 1])
    if np.any(infinite):
        if drop_essential:
            pairs = pairs[~infinite]
        elif infinity_cap is None:
            raise ConfigError(
                "diagram has infinite-death pairs; pass infinity_cap to truncate "
                "them or drop_essential=True to exclude them"
            )
        else:
            cap = float(infinity_cap)
            if not np.isfinite(cap):
                raise ConfigError(f"infinity_cap must be finite, got {infinity_cap!r}")
            pairs = pairs.copy()
            pairs[infinite, 1] = cap
            pairs = pairs[pairs[:, 1] > pairs[:, 0]]
    return [(float(b), float(dd)) for b, dd in pairs]


def landscape_from_diagram(
    d, infinity_cap: float | None = None, drop_essential: bool = False
) -> Landscape:
    """Exact landscape of a persistence diagram (or (m, 2) pair array).

    Infinite deaths are not representable as tents: by default they raise a
    ConfigError; ``infinity_cap`` truncates them at a finite value instead
    (pairs whose birth reaches the cap are dropped), and
    ``drop_essential=True`` excludes them.
    """
    pairs = _finite_pairs(d, infinity_cap, drop_essential)
    if not pairs:
        return Landscape(depths=())

    # queue sorted by (birth asc, death desc)
    queue = sorted((b, -dd) for b, dd in pairs)
    depths = []
    while queue:
        b, nd = queue.pop(0)
        d_cur = -nd
        pts = [(b, 0.0), ((b + d_cur) / 2.0, (d_cur - b) / 2.0)]
        while True:
            nxt = None
            for i, (b2, nd2) in enumerate(queue):
                if -nd2 > d_cur:
                    nxt = i
                    break
            if nxt is None:
                pts.append((d_cur, 0.0))
                break
            b2, nd2 = queue.pop(nxt)
            d2 = -nd2
            if b2 >= d_cur:
                pts.append((d_cur, 0.0))
            if b2 > d_cur:
                pts.append((b2, 0.0))
            if b2 < d_cur:
                # tents cross; the dominated remainder feeds the next depth
                pts.append(((b2 + d_cur) / 2.0, (d_cur - b2) / 2.0))
                bisect.insort(queue, (b2, -d_cur))
            pts.append(((b2 + d2) / 2.0, (d2 - b2) / 2.0))
            d_cur = d2
        # adjacent critical points can collide in floating point when two
        # births/deaths differ by less than an ulp; keep the first of each
        # collision and pin the final point back to the axis if its zero got
        # swallowed (the lost tent tail is below float resolution)
        xs_list: list[float] = []
        ys_list: list[float] = []
        for x, y in pts:
            if xs_list and x == xs_list[-1]:
                continue
            xs_list.append(x)
            ys_list.append(y)
        ys_list[-1] = 0.0
        depths.append((np.array(xs_list), np.array(ys_list)))
    return Landscape(depths=tuple(depths))


def discretize(l: Landscape, grid: Grid, n_depths: int) -> DiscretizedLandscape:
    """Sample a landscape on ``grid`` for depths 1..n_depths (zero-filled past K)."""
    if n_depths < 1:
        raise ConfigError(f"n_depths must be >= 1, got {n_depths}")
    ts = grid.ts
    values = np.zeros((n_depths, grid.size))
    for k in range(min(n_depths, l.n_depths)):
        values[k] = l.evaluate(k, ts)
    return DiscretizedLandscape(grid=grid, values=values)


def _check_compatible(ls: Sequence[DiscretizedLandscape]) -> None:
    first = ls[0]
    for other in ls[1:]:
        if other.grid != first.grid or other.n_depths != first.n_depths:
            raise DataError(
                f"incompatible landscape vectors: {other.grid}/K={other.n_depths} "
                f"vs {first.grid}/K={first.n_depths}"
            )


def average_landscapes(ls: Sequence[DiscretizedLandscape]) -> DiscretizedLandscape:
    """Pointwise mean; all inputs must share grid and depth count."""
    ls = list(ls)
    if not ls:
        raise DataError("cannot average an empty collection")
    _check_compatible(ls)
    stack = np.stack([l.values for l in ls])
    return DiscretizedLandscape(grid=ls[0].grid, values=stack.mean(axis=0))


def landscape_distance(a: DiscretizedLandscape, b: DiscretizedLandscape) -> float:
    """Euclidean distance between the flattened K x G vectors."""
    _check_compatible([a, b])
    return float(np.linalg.norm(a.vector - b.vector))


def mean_landscape(ls: Sequence[Landscape]) -> Landscape:
    """Exact pointwise mean of landscapes, no grid involved.

    Each lambda_k is linear between any two consecutive breakpoints of the
    union mesh, so evaluating every input on the merged breakpoints and
    averaging is exact. Missing depths count as zero.
    """
    ls = list(ls)
    if not ls:
        raise DataError("cannot average an empty collection")
    max_k = max(l.n_depths for l in ls)
    depths = []
    for k in range(max_k):
        mesh = np.unique(
            np.concatenate(
                [l.depths[k][0] for l in ls if k < l.n_depths and l.depths[k][0].size]
            )
        )
        ys = np.zeros(mesh.size)
        for l in ls:
            ys += l.evaluate(k, mesh)
        ys /= len(ls)
        depths.append((mesh, ys))
    return Landscape(depths=tuple(depths))


def normalize_class_distances(
    summaries: Sequence[ClassSummary],
) -> tuple[list[str], np.ndarray]:
    """Distance matrix among class means and the zero landscape ("origin").

    Returns (labels, matrix): labels[0] is ``"origin"``, the matrix is
    symmetric with zero diagonal, and the whole matrix is scaled so the mean
    of the class-to-origin distances is exactly 1.
    """
    summaries = list(summaries)
    if not summaries:
        raise DataError("need at least one class summary")
    _check_compatible([s.mean for s in summaries])
    vectors = [np.zeros_like(summaries[0].mean.vector)] + [
        s.mean.vector for s in summaries
    ]
    labels = ["origin"] + [s.label for s in summaries]
    m = len(vectors)
    dist = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            dist[i, j] = dist[j, i] = np.linalg.norm(vectors[i] - vectors[j])
    scale = dist[0, 1:].mean()
    if scale == 0.0:
        raise NumericalError(
            "all class means are zero landscapes; distances cannot be normalized"
        )
    return labels, dist / scale
