"""Sparse Z/2 boundary-matrix reduction kernels.

Columns are kept as sorted arrays of row indices; a column's "low" is its
largest row index. Degree-1 pairing runs on the coboundary side (columns =
edges in reverse filtration order), which touches E columns instead of the
vastly larger number of triangles; the death triangles it finds are then
re-reduced on the boundary side in filtration order — removing columns that
reduce to zero changes nothing, since they never serve as pivots — which
recovers the same pairing together with representative cycles. Degree 0
needs no reduction: with all vertices entering at 0, the diagram depends
only on which edges merge components, a union-find question. Hot loops are
numba-compiled; the pool/buffer layout avoids per-column allocations.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def merge_edges(edge_rows, n_vertices):
    """Indices of the edges that merge two components, in column order.

    edge_rows: (E, 2) int64 vertex pairs in filtration order. The returned
    edges are the degree-0 death simplices; the classes they kill were all
    born at value 0.
    """
    parent = np.arange(n_vertices)
    out = np.empty(edge_rows.shape[0], np.int64)
    k = 0
    for j in range(edge_rows.shape[0]):
        a = edge_rows[j, 0]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = edge_rows[j, 1]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
            out[k] = j
            k += 1
    return out[:k]


@njit(cache=True)
def reduce_degree1_cohom(indptr, rows, cleared, n_tris):
    """Reduce the degree-1 coboundary matrix; find the (edge, triangle) pairing.

    Columns are edges, processed from the last filtration index down to 0;
    ``rows[indptr[e] : indptr[e+1]]`` holds the reversed triangle indices
    (n_tris - 1 - rank) of the cofacets of edge ``e``, sorted ascending.
    ``cleared[e]`` marks degree-0 death edges, whose columns are known to
    reduce to zero and are skipped.

    Returns (paired_edge, death_row, n_pairs, essential, n_essential):
    pivot pairs (edge e dies at triangle with reversed index death_row) and
    the uncleared zero columns, which are essential degree-1 births.
    """
    E = indptr.shape[0] - 1
    pivot_col = np.full(n_tris, -1, np.int64)
    col_start = np.zeros(n_tris, np.int64)
    col_len = np.zeros(n_tris, np.int64)
    pool = np.empty(max(16, 4 * E), np.int64)
    pool_len = 0
    cur = np.empty(max(4, n_tris), np.int64)
    tmp = np.empty(max(4, n_tris), np.int64)
    paired_edge = np.empty(E, np.int64)
    death_row = np.empty(E, np.int64)
    essential = np.empty(E, np.int64)
    n_pairs = 0
    n_essential = 0

    for c in range(E - 1, -1, -1):
        if cleared[c]:
            continue
        s0 = indptr[c]
        m = indptr[c + 1] - s0
        for q in range(m):
            cur[q] = rows[s0 + q]
        while m > 0:
            low = cur[m - 1]
            p = pivot_col[low]
            if p == -1:
                pivot_col[low] = c
                if pool_len + m > pool.size:
                    newcap = pool.size * 2
                    while newcap < pool_len + m:
                        newcap *= 2
                    newpool = np.empty(newcap, np.int64)
                    newpool[:pool_len] = pool[:pool_len]
                    pool = newpool
                col_start[low] = pool_len
                col_len[low] = m
                for q in range(m):
                    pool[pool_len + q] = cur[q]
                pool_len += m
                paired_edge[n_pairs] = c
                death_row[n_pairs] = low
                n_pairs += 1
                break
            s = col_start[low]
            ln = col_len[low]
            a = 0
            b = 0
            k = 0
            while a < m and b < ln:
                x = cur[a]
                y = pool[s + b]
                if x < y:
                    tmp[k] = x
                    k += 1
                    a += 1
                elif y < x:
                    tmp[k] = y
                    k += 1
                    b += 1
                else:
                    a += 1
                    b += 1
            while a < m:
                tmp[k] = cur[a]
                k += 1
                a += 1
            while b < ln:
                tmp[k] = pool[s + b]
                k += 1
                b += 1
            cur, tmp = tmp, cur
            m = k
        if m == 0:
            essential[n_essential] = c
            n_essential += 1
    return paired_edge[:n_pairs], death_row[:n_pairs], essential[:n_essential]


@njit(cache=True)
def reduce_degree2(tri_rows, n_edges):
    """Reduce triangle boundary columns over edge rows, in the given order.

    tri_rows: (T, 3) int64, the edge row indices of each triangle column,
    each row sorted ascending.

    Returns (pivot_col, pool, col_start, col_len):
      pivot_col[e] = index of the column whose reduced low is edge e, or -1;
      pool[col_start[e] : col_start[e] + col_len[e]] = that reduced column's
      edge rows, sorted ascending (a cycle born at its largest edge).
    """
    T = tri_rows.shape[0]
    pivot_col = np.full(n_edges, -1, np.int64)
    col_start = np.zeros(n_edges, np.int64)
    col_len = np.zeros(n_edges, np.int64)
    pool = np.empty(max(16, 4 * T), np.int64)
    pool_len = 0
    cur = np.empty(max(4, n_edges), np.int64)
    tmp = np.empty(max(4, n_edges), np.int64)

    for j in range(T):
        cur[0] = tri_rows[j, 0]
        cur[1] = tri_rows[j, 1]
        cur[2] = tri_rows[j, 2]
        m = 3
        while m > 0:
            low = cur[m - 1]
            p = pivot_col[low]
            if p == -1:
                pivot_col[low] = j
                if pool_len + m > pool.size:
                    newcap = pool.size * 2
                    while newcap < pool_len + m:
                        newcap *= 2
                    newpool = np.empty(newcap, np.int64)
                    newpool[:pool_len] = pool[:pool_len]
                    pool = newpool
                col_start[low] = pool_len
                col_len[low] = m
                for q in range(m):
                    pool[pool_len + q] = cur[q]
                pool_len += m
                break
            s = col_start[low]
            ln = col_len[low]
            a = 0
            b = 0
            k = 0
            while a < m and b < ln:
                x = cur[a]
                y = pool[s + b]
                if x < y:
                    tmp[k] = x
                    k += 1
                    a += 1
                elif y < x:
                    tmp[k] = y
                    k += 1
                    b += 1
                else:
                    a += 1
                    b += 1
            while a < m:
                tmp[k] = cur[a]
                k += 1
                a += 1
            while b < ln:
                tmp[k] = pool[s + b]
                k += 1
                b += 1
            cur, tmp = tmp, cur
            m = k
    return pivot_col, pool[:pool_len], col_start, col_len
