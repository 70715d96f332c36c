"""PCA, classical MDS, and permutation tests for landscape vectors.

Vector collections here are small-n / huge-d (hundreds of samples, K*G
landscape coordinates), so PCA and the permutation statistic both go through
the n-by-n Gram matrix rather than any d-by-d object.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .homology import DistanceMatrix

_PERM_BATCH = 4096
_RANK_RTOL = 1e-12


def _as_matrix(vectors, name="vectors") -> np.ndarray:
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError(f"{name} must be a non-empty list of equal-length vectors")
    if not np.all(np.isfinite(X)):
        raise DataError(f"{name} contain non-finite entries")
    return X


@dataclass(frozen=True)
class PCAResult:
    """Top principal components of a sample (population covariance, divisor n)."""

    mean: np.ndarray
    components: np.ndarray           # (k, d), unit rows
    explained_variance: np.ndarray   # (k,), descending
    cumulative: np.ndarray           # (k,), fractions of total variance

    def project(self, vectors) -> np.ndarray:
        X = _as_matrix(vectors)
        return (X - self.mean) @ self.components.T


@dataclass(frozen=True)
class MDSEmbedding:
    """Classical MDS coordinates (centered) plus Kruskal stress-1."""

    coordinates: np.ndarray  # (n, target_dim)
    stress: float


@dataclass(frozen=True)
class PermutationResult:
    observed: float
    p_value: float
    n_perms: int


def pca(vectors, k: int) -> PCAResult:
    """Top-k eigenpairs of the population covariance via the Gram matrix.

    Components are unit vectors with the sign fixed so each component's
    largest-magnitude coordinate is positive; eigenvalues below numerical
    rank are dropped, so fewer than k components may come back (identical
    inputs yield zero variance and no components at all).
    """
    X = _as_matrix(vectors)
    n, d = X.shape
    if n < 2:
        raise DataError(f"pca needs at least 2 vectors, got {n}")
    if not 1 <= k <= min(n - 1, d):
        raise ConfigError(
            f"k must satisfy 1 <= k <= min(n - 1, dim) = {min(n - 1, d)}, got {k}"
        )
    mean = X.mean(axis=0)
    C = X - mean
    gram = C @ C.T
    eigvals, eigvecs = np.linalg.eigh(gram)
    eigvals = eigvals[::-1]
    eigvecs = eigvecs[:, ::-1]
    total = float(np.trace(gram))

    keep = eigvals > max(eigvals[0] if eigvals.size else 0.0, 0.0) * _RANK_RTOL
    keep &= eigvals > 0.0
    eigvals = eigvals[keep][:k]
    eigvecs = eigvecs[:, keep][:, :k]

    components = np.zeros((eigvals.size, d))
    for i in range(eigvals.size):
        v = C.T @ eigvecs[:, i] / np.sqrt(eigvals[i])
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        components[i] = v
    explained = eigvals / n
    cumulative = np.cumsum(explained) / (total / n) if total > 0 else np.zeros(0)
    return PCAResult(
        mean=mean,
        components=components,
        explained_variance=explained,
        cumulative=cumulative[: eigvals.size],
    )


def per_coordinate_std(vectors) -> np.ndarray:
    """Population standard deviation (divisor n) of each coordinate."""
    X = _as_matrix(vectors)
    if X.shape[0] < 2:
        raise DataError("per_coordinate_std needs at least 2 vectors")
    return X.std(axis=0)


def mds(distances, target_dim: int = 2) -> MDSEmbedding:
    """Classical multidimensional scaling by double centering.

    Negative eigenvalues of the centered Gram matrix are truncated to zero,
    which pads coordinates with zero columns when the metric has lower rank
    than ``target_dim``. Stress is Kruskal's stress-1 between the input and
    embedded distances.
    """
    if not isinstance(distances, DistanceMatrix):
        distances = DistanceMatrix(np.asarray(distances))
    if target_dim < 1:
        raise ConfigError(f"target_dim must be >= 1, got {target_dim}")
    D = distances.entries
    n = distances.n
    D2 = D * D
    J = np.eye(n) - np.full((n, n), 1.0 / n)
    B = -0.5 * J @ D2 @ J
    B = (B + B.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(B)
    eigvals = np.maximum(eigvals[::-1][:target_dim], 0.0)
    eigvecs = eigvecs[:, ::-1][:, :target_dim]
    coords = eigvecs * np.sqrt(eigvals)
    for j in range(coords.shape[1]):
        col = coords[:, j]
        if col.size and col[np.argmax(np.abs(col))] < 0:
            coords[:, j] = -col
    coords = coords - coords.mean(axis=0)

    iu = np.triu_indices(n, 1)
    orig = D[iu]
    if orig.size == 0 or np.all(orig == 0.0):
        stress = 0.0
    else:
        emb = np.sqrt(
            np.maximum(
                ((coords[:, None, :] - coords[None, :, :]) ** 2).sum(-1)[iu], 0.0
            )
        )
        stress = float(np.sqrt(((orig - emb) ** 2).sum() / (orig**2).sum()))
    return MDSEmbedding(coordinates=coords, stress=stress)


def _canonical_rows(X: np.ndarray) -> np.ndarray:
    """Row order by raw bytes: deterministic and independent of input order."""
    flat = np.ascontiguousarray(X)
    keys = flat.view([("bytes", np.void, flat.shape[1] * flat.itemsize)]).ravel()
    return np.argsort(keys, kind="stable")


def permutation_test(a, b, n_perms: int = 10000, seed: int | None = None) -> PermutationResult:
    """Two-sample permutation test on the distance between group means.

    The statistic is ||mean(a) - mean(b)||. Group labels are permuted
    preserving group sizes; p = (#{permuted >= observed} + 1) / (n_perms + 1),
    so p is never zero and ties count in favor of the null. The permutation
    stream is derived from (seed, batch index) with a counter-based
    generator, making the result reproducible and batch-parallel friendly.
    """
    A = _as_matrix(a, "a")
    B = _as_matrix(b, "b")
    if A.shape[1] != B.shape[1]:
        raise DataError(
            f"vector length mismatch: {A.shape[1]} vs {B.shape[1]}"
        )
    if n_perms < 1:
        raise ConfigError(f"n_perms must be >= 1, got {n_perms}")
    if seed is None:
        raise ConfigError("seed is required for a reproducible permutation test")

    diff = A.mean(axis=0) - B.mean(axis=0)
    obs2 = float(diff @ diff)

    pooled = np.vstack([A, B])
    pooled = pooled[_canonical_rows(pooled)]
    n = pooled.shape[0]
    m = min(A.shape[0], B.shape[0])
    if n - m == 0:
        raise DataError("permutation test needs both groups non-empty")

    gram = pooled @ pooled.T
    g1 = gram.sum(axis=1)
    tt = float(g1.sum())

    count = 0
    done = 0
    batch_index = 0
    while done < n_perms:
        size = min(_PERM_BATCH, n_perms - done)
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence((int(seed), batch_index)))
        )
        M = np.zeros((size, n), dtype=np.float64)
        for r in range(size):
            M[r, rng.permutation(n)[:m]] = 1.0
        s_s = ((M @ gram) * M).sum(axis=1)          # ||sum_S x||^2
        s_t = M @ g1                                 # (sum_S x) . (sum_all x)
        rest = n - m
        q = (
            s_s / (m * m)
            + (tt - 2.0 * s_t + s_s) / (rest * rest)
            - 2.0 * (s_t - s_s) / (m * rest)
        )
        q = np.maximum(q, 0.0)
        count += int(np.count_nonzero(q >= obs2))
        done += size
        batch_index += 1

    p = (count + 1) / (n_perms + 1)
    return PermutationResult(observed=float(np.sqrt(obs2)), p_value=float(p), n_perms=int(n_perms))
