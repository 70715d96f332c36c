"""Vietoris-Rips filtrations and persistent homology over Z/2.

A Rips simplex enters the filtration at its diameter (largest pairwise
distance among its vertices). Persistence pairs come from sparse column
reduction of the boundary matrices (see ``_reduction``): triangles are
reduced first and the edges they pair are cleared before the degree-0 pass.
Zero-persistence pairs (birth == death) are discarded.

Ties in filtration value are ordered by (dimension, lexicographic vertex
tuple). Diagrams are insensitive to tie order; representative cycles are not,
and are deterministic only with respect to this canonical ordering.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from . import _reduction
from .embed import PointCloud
from .errors import ConfigError, DataError, NumericalError


@dataclass(frozen=True)
class DistanceMatrix:
    """A finite metric: square, symmetric, zero diagonal, non-negative."""

    entries: np.ndarray

    def __post_init__(self):
        d = np.ascontiguousarray(self.entries, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise DataError(f"distance matrix must be square, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise DataError("distance matrix contains non-finite entries")
        if not np.array_equal(d, d.T):
            raise DataError("distance matrix is not symmetric")
        if np.any(np.diag(d) != 0.0):
            raise DataError("distance matrix diagonal is not zero")
        if np.any(d < 0.0):
            raise DataError("distance matrix has negative entries")
        d.setflags(write=False)
        object.__setattr__(self, "entries", d)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class Filtration:
    """Simplices of a filtered complex, grouped by dimension.

    ``by_dim[p]`` is a pair ``(verts, values)`` where ``verts`` is an
    (m, p+1) int64 array with each row sorted ascending and rows in
    (value, lexicographic) order, and ``values`` the filtration values.
    Vertices (dimension 0) are implicit: ``n_vertices`` points at value 0.
    """

    n_vertices: int
    by_dim: Mapping[int, tuple[np.ndarray, np.ndarray]]
    max_dim: int
    max_radius: float

    @property
    def n_simplices(self) -> int:
        return self.n_vertices + sum(v.shape[0] for v, _ in self.by_dim.values())

    def simplices(self) -> Iterator[tuple[tuple[int, ...], float, int]]:
        """Yield (vertices, value, dimension) in global filtration order.

        Order is (value, dimension, lexicographic vertices) ascending, the
        order the reduction consumes columns in.
        """
        streams = []
        for v in range(self.n_vertices):
            streams.append(((0.0, 0, (v,)), ((v,), 0.0, 0)))
        for p in sorted(self.by_dim):
            verts, values = self.by_dim[p]
            for row, val in zip(verts, values):
                tup = tuple(int(x) for x in row)
                streams.append(((float(val), p, tup), (tup, float(val), p)))
        streams.sort(key=lambda s: s[0])
        for _, item in streams:
            yield item


@dataclass(frozen=True)
class PersistenceDiagram:
    """Birth/death pairs in one homology degree; death may be +inf."""

    degree: int
    pairs: np.ndarray  # (m, 2) float64, sorted by (birth, death)

    def __post_init__(self):
        p = np.ascontiguousarray(self.pairs, dtype=np.float64).reshape(-1, 2)
        if p.size and np.any(p[:, 1] <= p[:, 0]):
            raise DataError("diagram contains pairs with death <= birth")
        order = np.lexsort((p[:, 1], p[:, 0]))
        p = p[order].copy()
        p.setflags(write=False)
        object.__setattr__(self, "pairs", p)

    def __len__(self) -> int:
        return self.pairs.shape[0]

    @property
    def persistences(self) -> np.ndarray:
        return self.pairs[:, 1] - self.pairs[:, 0]


@dataclass(frozen=True)
class RepresentativeCycle:
    """A Z/2 1-cycle attached to a finite persistence pair.

    Edges are (u, v) vertex pairs with u < v; every edge enters the
    filtration at or before the pair's birth.
    """

    pair: tuple[float, float]
    edges: tuple[tuple[int, int], ...]

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for e in self.edges for v in e}))


def pairwise_distances(points) -> DistanceMatrix:
    """Euclidean distance matrix of a point cloud (PointCloud or (n, d) array)."""
    if isinstance(points, PointCloud):
        pts = points.points
    else:
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise DataError(f"expected a non-empty (n, d) point array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise DataError("point cloud contains non-finite coordinates")
    if pts.shape[0] == 1:
        d = np.zeros((1, 1))
    else:
        d = squareform(pdist(pts))
    return DistanceMatrix(d)


def enclosing_radius(dm: DistanceMatrix | np.ndarray) -> float:
    """min over points of the max distance to any other point.

    Beyond this radius the Rips complex is a cone and carries no new
    homology, so it is the default filtration cap.
    """
    d = dm.entries if isinstance(dm, DistanceMatrix) else DistanceMatrix(np.asarray(dm)).entries
    return float(np.min(np.max(d, axis=1)))


def _lex_sorted(verts: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    keys = tuple(verts[:, c] for c in range(verts.shape[1] - 1, -1, -1)) + (values,)
    order = np.lexsort(keys)
    return np.ascontiguousarray(verts[order]), np.ascontiguousarray(values[order])


def vietoris_rips(dm, max_dim: int = 2, max_radius: float | str = "enclosing") -> Filtration:
    """Build the Rips filtration up to ``max_dim`` and radius ``max_radius``.

    ``max_radius`` may be the string ``"enclosing"`` (the default) to use
    :func:`enclosing_radius`. Simplices with diameter strictly greater than
    the cap are excluded.
    """
    if not isinstance(dm, DistanceMatrix):
        dm = DistanceMatrix(np.asarray(dm))
    if not isinstance(max_dim, (int, np.integer)) or max_dim < 0:
        raise ConfigError(f"max_dim must be a non-negative integer, got {max_dim!r}")
    if isinstance(max_radius, str):
        if max_radius != "enclosing":
            raise ConfigError(f"max_radius must be a number or 'enclosing', got {max_radius!r}")
        r = enclosing_radius(dm)
    else:
        r = float(max_radius)
        if not np.isfinite(r) or r < 0.0:
            raise ConfigError(f"max_radius must be finite and non-negative, got {max_radius!r}")

    d = dm.entries
    n = dm.n
    by_dim: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    if max_dim >= 1 and n >= 2:
        iu, ju = np.triu_indices(n, 1)
        dv = d[iu, ju]
        keep = dv <= r
        if keep.any():
            everts = np.stack([iu[keep], ju[keep]], axis=1).astype(np.int64)
            by_dim[1] = _lex_sorted(everts, dv[keep])

    if max_dim >= 2 and n >= 3 and 1 in by_dim:
        chunks_v = []
        chunks_val = []
        for k in range(2, n):
            i, j = np.triu_indices(k, 1)
            diam = np.maximum(np.maximum(d[i, j], d[i, k]), d[j, k])
            keep = diam <= r
            if keep.any():
                kk = np.full(int(keep.sum()), k, dtype=np.int64)
                chunks_v.append(np.stack([i[keep], j[keep], kk], axis=1).astype(np.int64))
                chunks_val.append(diam[keep])
        if chunks_v:
            tverts = np.concatenate(chunks_v, axis=0)
            tvals = np.concatenate(chunks_val)
            by_dim[2] = _lex_sorted(tverts, tvals)

    for p in range(3, max_dim + 1):
        if n < p + 1 or (p - 1) not in by_dim:
            break
        combos = np.array(list(itertools.combinations(range(n), p + 1)), dtype=np.int64)
        diam = np.zeros(combos.shape[0])
        for a, b in itertools.combinations(range(p + 1), 2):
            diam = np.maximum(diam, d[combos[:, a], combos[:, b]])
        keep = diam <= r
        if not keep.any():
            break
        by_dim[p] = _lex_sorted(combos[keep], diam[keep])

    for verts, values in by_dim.values():
        verts.setflags(write=False)
        values.setflags(write=False)
    return Filtration(n_vertices=n, by_dim=by_dim, max_dim=max_dim, max_radius=r)


def _edge_lookup(edges: np.ndarray, n: int):
    """Return a vectorized (u, v) -> edge row index resolver."""
    keys = edges[:, 0].astype(np.int64) * n + edges[:, 1]
    order = np.argsort(keys, kind="stable")
    skeys = keys[order]

    def resolve(u: np.ndarray, v: np.ndarray) -> np.ndarray:
        q = u.astype(np.int64) * n + v
        pos = np.searchsorted(skeys, q)
        pos_c = np.minimum(pos, len(skeys) - 1) if len(skeys) else pos
        ok = (pos < len(skeys)) & (skeys[pos_c] == q) if len(skeys) else np.zeros(len(q), bool)
        if not np.all(ok):
            bad = np.argmin(ok)
            raise DataError(
                f"filtration is missing edge ({int(u[bad])}, {int(v[bad])}) "
                "required as a face"
            )
        return order[pos]

    return resolve


def _validate_faces(f: Filtration) -> None:
    """Cheap structural checks plus a closure walk for dimensions >= 3.

    Triangle faces are validated vectorized inside :func:`_reduce`, which
    needs the resolved edge rows anyway.
    """
    for p in sorted(f.by_dim):
        verts, values = f.by_dim[p]
        if verts.size and (verts.min() < 0 or verts.max() >= f.n_vertices):
            raise DataError("simplex vertex out of range")
        if np.any(np.diff(verts, axis=1) <= 0):
            raise DataError("simplex vertices must be strictly increasing")
        if p <= 1:
            continue
        if (p - 1) not in f.by_dim:
            raise DataError(f"filtration has {p}-simplices but no {p - 1}-simplices")
        if p == 2:
            continue
        fverts, fvalues = f.by_dim[p - 1]
        fkeys = {tuple(int(x) for x in row): val for row, val in zip(fverts, fvalues)}
        for row, val in zip(verts, values):
            tup = tuple(int(x) for x in row)
            for face in itertools.combinations(tup, p):
                fval = fkeys.get(face)
                if fval is None:
                    raise DataError(f"filtration is missing face {face} of {tup}")
                if fval > val:
                    raise DataError(
                        f"face {face} enters at {fval} after its coface {tup} at {val}"
                    )


def _reduce(f: Filtration):
    """Validate the filtration and compute the full degree-0/1 pairing.

    Degree 0 comes from union-find over the edges in filtration order.
    Degree 1 is paired on the coboundary side (edge columns in reverse
    order, degree-0 deaths cleared), after which only the death triangle
    columns are re-reduced on the boundary side in filtration order; zero
    columns never serve as pivots, so dropping them reproduces the same
    pairing and yields a representative cycle per pair.
    """
    _validate_faces(f)
    n = f.n_vertices
    if 1 in f.by_dim:
        edges, edge_values = f.by_dim[1]
    else:
        edges = np.empty((0, 2), np.int64)
        edge_values = np.empty(0)
    n_edges = edges.shape[0]

    h0_edges = _reduction.merge_edges(edges, n) if n_edges else np.empty(0, np.int64)

    tri_values = np.empty(0)
    death_tris = np.empty(0, np.int64)
    pivot_col = np.full(n_edges, -1, np.int64)
    pool = np.empty(0, np.int64)
    col_start = np.zeros(n_edges, np.int64)
    col_len = np.zeros(n_edges, np.int64)
    essential_edges = np.nonzero(~np.isin(np.arange(n_edges), h0_edges))[0]

    if 2 in f.by_dim and n_edges:
        tris, tri_values = f.by_dim[2]
        n_tris = tris.shape[0]
        resolve = _edge_lookup(edges, n)
        e1 = resolve(tris[:, 0], tris[:, 1])
        e2 = resolve(tris[:, 0], tris[:, 2])
        e3 = resolve(tris[:, 1], tris[:, 2])
        if np.any(
            np.maximum(np.maximum(edge_values[e1], edge_values[e2]), edge_values[e3])
            > tri_values
        ):
            raise DataError("a face enters the filtration after its coface")

        rev = n_tris - 1 - np.arange(n_tris, dtype=np.int64)
        col_of = np.concatenate([e1, e2, e3])
        row_of = np.concatenate([rev, rev, rev])
        order = np.lexsort((row_of, col_of))
        rows_csr = np.ascontiguousarray(row_of[order])
        indptr = np.zeros(n_edges + 1, np.int64)
        indptr[1:] = np.cumsum(np.bincount(col_of, minlength=n_edges))

        cleared = np.zeros(n_edges, bool)
        cleared[h0_edges] = True
        paired_edge, death_row, essential_edges = _reduction.reduce_degree1_cohom(
            indptr, rows_csr, cleared, n_tris
        )
        essential_edges = np.sort(essential_edges)

        death_tris = np.sort(n_tris - 1 - death_row)
        tri_rows = np.sort(np.stack([e1, e2, e3], axis=1), axis=1)
        pivot_sub, pool, col_start, col_len = _reduction.reduce_degree2(
            np.ascontiguousarray(tri_rows[death_tris]), n_edges
        )
        has = pivot_sub != -1
        pivot_col[has] = death_tris[pivot_sub[has]]

        p1 = np.stack([paired_edge, n_tris - 1 - death_row], axis=1)
        p1 = p1[np.lexsort((p1[:, 1], p1[:, 0]))]
        p2_edges = np.nonzero(has)[0]
        p2 = np.stack([p2_edges, pivot_col[p2_edges]], axis=1)
        if not np.array_equal(p1, p2):
            raise NumericalError("boundary/coboundary reductions disagree on the pairing")

    return {
        "edges": edges,
        "edge_values": edge_values,
        "tri_values": tri_values,
        "pivot_col": pivot_col,
        "pool": pool,
        "col_start": col_start,
        "col_len": col_len,
        "h0_edges": h0_edges,
        "essential_edges": essential_edges,
    }


def persistent_homology(f: Filtration, degrees: Sequence[int] = (0, 1)) -> list[PersistenceDiagram]:
    """Persistence diagrams of a Rips filtration in the requested degrees.

    Supports degrees 0 and 1 (the filtration must contain simplices one
    dimension above the largest requested degree for finite deaths to be
    detected there). Degree-0 classes are born at 0; one essential
    (0, inf) class remains per connected component at the radius cap.
    """
    degs = sorted(set(int(p) for p in degrees))
    if not degs:
        raise ConfigError("degrees must be non-empty")
    if any(p not in (0, 1) for p in degs):
        raise ConfigError(f"only degrees 0 and 1 are supported, got {degs}")
    red = _reduce(f)
    edge_values = red["edge_values"]
    tri_values = red["tri_values"]

    out = []
    for p in degs:
        if p == 0:
            deaths = edge_values[red["h0_edges"]]
            births = np.zeros_like(deaths)
            finite = np.stack([births, deaths], axis=1) if deaths.size else np.empty((0, 2))
            finite = finite[finite[:, 1] > finite[:, 0]]
            n_essential = f.n_vertices - len(deaths)
            ess = np.stack(
                [np.zeros(n_essential), np.full(n_essential, np.inf)], axis=1
            ) if n_essential else np.empty((0, 2))
            out.append(PersistenceDiagram(0, np.concatenate([finite, ess], axis=0)))
        else:
            pivot_col = red["pivot_col"]
            paired = np.nonzero(pivot_col != -1)[0]
            if paired.size:
                births = edge_values[paired]
                deaths = tri_values[pivot_col[paired]]
                finite = np.stack([births, deaths], axis=1)
                finite = finite[finite[:, 1] > finite[:, 0]]
            else:
                finite = np.empty((0, 2))
            ebirths = edge_values[red["essential_edges"]]
            ess = np.stack(
                [ebirths, np.full(ebirths.size, np.inf)], axis=1
            ) if ebirths.size else np.empty((0, 2))
            out.append(PersistenceDiagram(1, np.concatenate([finite, ess], axis=0)))
    return out


def representative_cycles(
    f: Filtration, diagram: PersistenceDiagram, top_k: int = 1
) -> list[RepresentativeCycle]:
    """Z/2 cycles for the ``top_k`` most persistent finite degree-1 pairs.

    The cycle attached to a pair is the reduced boundary column at the
    moment of pairing: a cycle born at the pair's birth that dies at its
    death. Pairs with infinite death carry no killing column and are
    skipped. Ties in persistence are broken by (birth, death, edge index).
    """
    if diagram.degree != 1:
        raise ConfigError(f"representative cycles require a degree-1 diagram, got degree {diagram.degree}")
    if top_k < 0:
        raise ConfigError(f"top_k must be non-negative, got {top_k}")
    red = _reduce(f)
    edges = red["edges"]
    edge_values = red["edge_values"]
    tri_values = red["tri_values"]
    pivot_col = red["pivot_col"]

    paired = np.nonzero(pivot_col != -1)[0]
    births = edge_values[paired]
    deaths = tri_values[pivot_col[paired]]
    pos = deaths > births
    paired, births, deaths = paired[pos], births[pos], deaths[pos]

    expected = {}
    for b, d in diagram.pairs:
        if np.isfinite(d):
            expected[(float(b), float(d))] = expected.get((float(b), float(d)), 0) + 1
    got = {}
    for b, d in zip(births, deaths):
        got[(float(b), float(d))] = got.get((float(b), float(d)), 0) + 1
    if expected != got:
        raise DataError("diagram does not match the filtration's degree-1 persistence")

    order = np.lexsort((paired, deaths, births, -(deaths - births)))
    cycles = []
    for idx in order[: min(top_k, len(order))]:
        e = paired[idx]
        s, ln = red["col_start"][e], red["col_len"][e]
        rows = red["pool"][s : s + ln]
        cyc = tuple((int(edges[r, 0]), int(edges[r, 1])) for r in rows)
        cycles.append(
            RepresentativeCycle(pair=(float(births[idx]), float(deaths[idx])), edges=cyc)
        )
    return cycles
