"""Brute-force reference implementations used to pin test expectations.

Everything here favors transparency over speed: persistence is computed
from GF(2) ranks of whole boundary matrices via the persistent-Betti
multiplicity formula, with no column reduction, pairing, or clearing —
deliberately a different algorithm from the library's.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def gf2_rref(M):
    """Row-reduced echelon form over GF(2). Returns (rref, pivot_cols)."""
    A = (np.asarray(M, dtype=np.uint8) & 1).copy()
    nr, nc = A.shape
    pivots = []
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        rows = np.nonzero(A[r:, c])[0]
        if rows.size == 0:
            continue
        p = r + rows[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        hit = np.nonzero(A[:, c])[0]
        hit = hit[hit != r]
        A[hit] ^= A[r]
        pivots.append(c)
        r += 1
    return A, pivots


def gf2_rank(M) -> int:
    M = np.asarray(M, dtype=np.uint8)
    if M.size == 0:
        return 0
    return len(gf2_rref(M)[1])


def gf2_nullspace(M) -> np.ndarray:
    """Columns form a basis of {x : Mx = 0} over GF(2); shape (nc, k)."""
    M = np.asarray(M, dtype=np.uint8)
    nr, nc = M.shape
    if nc == 0:
        return np.zeros((0, 0), np.uint8)
    if nr == 0:
        return np.eye(nc, dtype=np.uint8)
    R, pivots = gf2_rref(M)
    free = [c for c in range(nc) if c not in pivots]
    basis = np.zeros((nc, len(free)), np.uint8)
    for k, fc in enumerate(free):
        basis[fc, k] = 1
        for r, pc in enumerate(pivots):
            if R[r, fc]:
                basis[pc, k] = 1
    return basis


def boundary_matrix(faces: list[tuple], simplices: list[tuple]) -> np.ndarray:
    """Z/2 boundary matrix with rows indexed by ``faces``, columns by ``simplices``."""
    idx = {f: i for i, f in enumerate(faces)}
    M = np.zeros((len(faces), len(simplices)), np.uint8)
    for j, s in enumerate(simplices):
        for f in itertools.combinations(s, len(s) - 1):
            M[idx[f], j] = 1
    return M


def brute_rips_simplices(dmat, max_dim, max_radius):
    """All Rips simplices as {dim: [(vertex tuple, value)]}, diameters inclusive."""
    d = np.asarray(dmat, float)
    n = d.shape[0]
    out = {0: [((v,), 0.0) for v in range(n)]}
    for p in range(1, max_dim + 1):
        rows = []
        for comb in itertools.combinations(range(n), p + 1):
            diam = max(d[a, b] for a, b in itertools.combinations(comb, 2))
            if diam <= max_radius:
                rows.append((comb, float(diam)))
        if rows:
            out[p] = rows
    return out


def brute_persistence(simplices_by_dim: dict, degree: int):
    """Persistence pairs in one degree via persistent Betti numbers.

    ``simplices_by_dim`` maps dim -> list of (vertex tuple, value). Returns a
    sorted list of (birth, death) with death ``math.inf`` for essential
    classes, zero-persistence pairs dropped, multiplicity preserved.
    """
    p = degree
    psimp = sorted(simplices_by_dim.get(p, []), key=lambda sv: (sv[1], sv[0]))
    if not psimp:
        return []
    cofaces = sorted(simplices_by_dim.get(p + 1, []), key=lambda sv: (sv[1], sv[0]))
    faces = sorted(simplices_by_dim.get(p - 1, []), key=lambda sv: (sv[1], sv[0]))

    values = sorted(
        {v for _, v in psimp} | {v for _, v in cofaces} | {v for _, v in faces}
    )
    m = len(values)

    pcols = [s for s, _ in psimp]
    pvals = np.array([v for _, v in psimp])
    ccols = [s for s, _ in cofaces]
    cvals = np.array([v for _, v in cofaces])

    if p == 0:
        bdry_p = np.zeros((0, len(pcols)), np.uint8)
    else:
        bdry_p = boundary_matrix([s for s, _ in faces], pcols)
    bdry_q = boundary_matrix(pcols, ccols)

    # cycle-space bases Z_p(K_i), embedded in the full p-chain coordinates
    Z = []
    for i in range(m):
        keep = np.nonzero(pvals <= values[i])[0]
        nb = gf2_nullspace(bdry_p[:, keep])
        full = np.zeros((len(pcols), nb.shape[1]), np.uint8)
        full[keep] = nb
        Z.append(full)

    def betti(i, j):
        """dim Z_p(K_i) - dim(Z_p(K_i) ∩ B_p(K_j)), the persistent Betti number."""
        if i < 0:
            return 0
        Zi = Z[i]
        B = bdry_q[:, np.nonzero(cvals <= values[j])[0]]
        dimZ = Zi.shape[1]
        dimB = gf2_rank(B)
        dim_union = gf2_rank(np.hstack([Zi, B]))
        return dimZ - (dimZ + dimB - dim_union)

    pairs = []
    for j in range(1, m):
        for i in range(j):
            mult = (betti(i, j - 1) - betti(i, j)) - (betti(i - 1, j - 1) - betti(i - 1, j))
            pairs.extend([(values[i], values[j])] * mult)
    for i in range(m):
        mult = betti(i, m - 1) - betti(i - 1, m - 1)
        pairs.extend([(values[i], math.inf)] * mult)
    return sorted(pairs)


def brute_diagram_from_filtration(f, degree):
    """Run :func:`brute_persistence` on a library Filtration object."""
    simp = {0: [((v,), 0.0) for v in range(f.n_vertices)]}
    for p, (verts, vals) in f.by_dim.items():
        simp[p] = [
            (tuple(int(x) for x in row), float(v)) for row, v in zip(verts, vals)
        ]
    return brute_persistence(simp, degree)


def landscape_depth_oracle(pairs, k, ts):
    """lambda_k sampled at ``ts`` as the k-th largest tent value (1-based k)."""
    ts = np.asarray(ts, float)
    vals = np.zeros((len(pairs), ts.size))
    for i, (b, d) in enumerate(pairs):
        vals[i] = np.minimum(ts - b, d - ts)
    vals = np.maximum(vals, 0.0)
    if k > len(pairs):
        return np.zeros(ts.size)
    return np.sort(vals, axis=0)[len(pairs) - k]
