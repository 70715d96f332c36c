import numpy as np
import pytest

import topobehavior as tb
from topobehavior import ConfigError, DataError
from topobehavior.stats import per_coordinate_std


class TestPCA:
    def test_rank_one_line_explains_everything(self):
        t = np.linspace(-1, 1, 15)
        X = np.c_[t, 2 * t]
        res = tb.pca(X, 2)
        assert res.components.shape == (1, 2)  # second eigenvalue is numerically zero
        assert res.cumulative[0] == pytest.approx(1.0, abs=1e-12)
        direction = np.array([1.0, 2.0]) / np.sqrt(5.0)
        assert np.allclose(np.abs(res.components[0] @ direction), 1.0, atol=1e-12)

    def test_isotropic_gaussian_variances_comparable(self):
        rng = np.random.default_rng(0)
        res = tb.pca(rng.normal(size=(2000, 2)), 2)
        v1, v2 = res.explained_variance
        assert v2 <= v1 <= 1.2 * v2

    def test_full_rank_reconstruction(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(10, 6))
        res = tb.pca(X, 6)
        projected = res.project(X)
        recon = projected @ res.components + res.mean
        assert np.max(np.abs(recon - X)) < 1e-8

    def test_components_orthonormal(self):
        rng = np.random.default_rng(2)
        res = tb.pca(rng.normal(size=(12, 40)), 5)
        gram = res.components @ res.components.T
        assert np.allclose(gram, np.eye(res.components.shape[0]), atol=1e-10)

    def test_trace_identity(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(9, 5))
        res = tb.pca(X, min(8, 5))
        total = X.var(axis=0).sum()  # population variance
        assert res.explained_variance.sum() == pytest.approx(total, rel=1e-8)
        assert np.all(np.diff(res.explained_variance) <= 1e-15)
        assert np.all(np.diff(res.cumulative) >= -1e-15)
        assert res.cumulative[-1] <= 1 + 1e-8

    def test_matches_covariance_oracle(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(30, 4))
        res = tb.pca(X, 4)
        cov = np.cov(X.T, bias=True)
        evals, evecs = np.linalg.eigh(cov)
        evals, evecs = evals[::-1], evecs[:, ::-1]
        assert np.allclose(res.explained_variance, evals[: len(res.explained_variance)], atol=1e-10)
        for i, comp in enumerate(res.components):
            v = evecs[:, i]
            if v[np.argmax(np.abs(v))] < 0:
                v = -v
            assert np.allclose(comp, v, atol=1e-8)

    def test_sign_convention(self):
        rng = np.random.default_rng(5)
        res = tb.pca(rng.normal(size=(20, 7)), 3)
        for comp in res.components:
            assert comp[np.argmax(np.abs(comp))] > 0

    def test_identical_vectors_zero_variance(self):
        X = np.tile([1.0, 2.0, 3.0], (5, 1))
        res = tb.pca(X, 2)
        assert res.components.shape[0] == 0
        assert res.explained_variance.size == 0
        assert np.allclose(res.mean, [1.0, 2.0, 3.0])

    def test_validation(self):
        X = np.random.default_rng(6).normal(size=(5, 3))
        with pytest.raises(ConfigError):
            tb.pca(X, 0)
        with pytest.raises(ConfigError):
            tb.pca(X, 5)  # k > n-1
        with pytest.raises(DataError):
            tb.pca(X[:1], 1)
        with pytest.raises(DataError):
            tb.pca(np.array([[np.nan, 1.0], [0.0, 1.0]]), 1)


class TestPerCoordinateStd:
    def test_identical_vectors(self):
        assert np.all(per_coordinate_std(np.ones((4, 3))) == 0.0)

    def test_zero_two_pairs(self):
        X = np.array([[0.0, 0.0], [2.0, 2.0]])
        assert per_coordinate_std(X).tolist() == [1.0, 1.0]

    def test_matches_covariance_diagonal(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(25, 6))
        expect = np.sqrt(np.diag(np.cov(X.T, bias=True)))
        assert np.allclose(per_coordinate_std(X), expect, atol=1e-12)

    def test_shift_invariance(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(10, 4))
        shifted = X + np.array([5.0, -3.0, 0.25, 100.0])
        assert np.allclose(per_coordinate_std(X), per_coordinate_std(shifted), atol=1e-9)

    def test_needs_two_rows(self):
        with pytest.raises(DataError):
            per_coordinate_std(np.ones((1, 3)))


class TestMDS:
    def test_two_points(self):
        emb = tb.mds(np.array([[0.0, 3.0], [3.0, 0.0]]))
        x = emb.coordinates[:, 0]
        assert sorted(x.tolist()) == pytest.approx([-1.5, 1.5])
        assert emb.stress < 1e-12

    def test_collinear_points_recovered(self):
        D = np.abs(np.subtract.outer([0.0, 1.0, 3.0], [0.0, 1.0, 3.0]))
        emb = tb.mds(D)
        c = emb.coordinates
        re_dist = np.sqrt(((c[:, None] - c[None]) ** 2).sum(-1))
        assert np.allclose(re_dist, D, atol=1e-8)
        assert emb.stress < 1e-8

    def test_planar_configuration_exact(self):
        rng = np.random.default_rng(9)
        pts = rng.normal(size=(12, 2))
        D = tb.pairwise_distances(pts).entries
        emb = tb.mds(D)
        c = emb.coordinates
        re_dist = np.sqrt(((c[:, None] - c[None]) ** 2).sum(-1))
        assert np.max(np.abs(re_dist - D)) < 1e-8 * D.max()
        assert emb.stress < 1e-8
        assert np.allclose(c.mean(axis=0), 0.0, atol=1e-9)

    def test_extra_dimensions_are_zero(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        emb = tb.mds(tb.pairwise_distances(pts).entries, target_dim=3)
        assert emb.coordinates.shape == (4, 3)
        assert np.allclose(emb.coordinates[:, 2], 0.0, atol=1e-8)

    def test_coincident_points(self):
        emb = tb.mds(np.zeros((3, 3)))
        assert np.allclose(emb.coordinates, 0.0)
        assert emb.stress == 0.0

    def test_deterministic(self):
        rng = np.random.default_rng(10)
        D = tb.pairwise_distances(rng.normal(size=(8, 3))).entries
        a, b = tb.mds(D), tb.mds(D)
        assert np.array_equal(a.coordinates, b.coordinates)

    def test_validation(self):
        with pytest.raises(DataError):
            tb.mds(np.array([[0.0, 1.0], [2.0, 0.0]]))
        with pytest.raises(ConfigError):
            tb.mds(np.zeros((3, 3)), target_dim=0)


class TestPermutationTest:
    def test_separated_clusters_significant(self):
        rng = np.random.default_rng(11)
        a = rng.normal(0.0, 0.1, (12, 3))
        b = rng.normal(5.0, 0.1, (12, 3)) + np.array([5.0, 0.0, 0.0])
        res = tb.permutation_test(a, b, n_perms=999, seed=1)
        assert res.p_value < 0.01
        assert res.observed > 4.0

    def test_identical_groups_give_p_one(self):
        rng = np.random.default_rng(12)
        a = rng.normal(size=(7, 4))
        res = tb.permutation_test(a, a.copy(), n_perms=500, seed=2)
        assert res.observed == 0.0
        assert res.p_value == 1.0

    def test_p_value_bounds_and_add_one_rule(self):
        rng = np.random.default_rng(13)
        a = rng.normal(0, 1, (6, 2))
        b = rng.normal(40, 1, (6, 2))
        res = tb.permutation_test(a, b, n_perms=99, seed=3)
        # nothing beats a 40-sigma separation except the +1 guard
        assert res.p_value == pytest.approx(1 / 100)

    def test_deterministic_under_seed(self):
        rng = np.random.default_rng(14)
        a, b = rng.normal(size=(9, 5)), rng.normal(0.5, 1.0, (11, 5))
        r1 = tb.permutation_test(a, b, n_perms=1000, seed=42)
        r2 = tb.permutation_test(a, b, n_perms=1000, seed=42)
        assert (r1.observed, r1.p_value) == (r2.observed, r2.p_value)

    def test_relabel_invariance(self):
        rng = np.random.default_rng(15)
        a, b = rng.normal(size=(8, 3)), rng.normal(0.3, 1.0, (13, 3))
        r_ab = tb.permutation_test(a, b, n_perms=750, seed=7)
        r_ba = tb.permutation_test(b, a, n_perms=750, seed=7)
        assert r_ab.observed == r_ba.observed
        assert r_ab.p_value == r_ba.p_value

    def test_coordinate_permutation_keeps_statistic(self):
        # reordering coordinates preserves the observed statistic; the
        # p-value only agrees statistically because the pooled rows sort
        # differently
        rng = np.random.default_rng(16)
        a, b = rng.normal(size=(10, 6)), rng.normal(0.4, 1.0, (10, 6))
        perm = rng.permutation(6)
        r1 = tb.permutation_test(a, b, n_perms=2000, seed=8)
        r2 = tb.permutation_test(a[:, perm], b[:, perm], n_perms=2000, seed=8)
        assert r1.observed == pytest.approx(r2.observed, rel=1e-12)
        assert abs(r1.p_value - r2.p_value) < 0.05

    def test_null_p_values_spread_over_unit_interval(self):
        # small-scale sanity check; the fuller calibration lives with the
        # acceptance criteria
        rng = np.random.default_rng(17)
        ps = []
        for trial in range(40):
            pool = rng.normal(size=(16, 3))
            ps.append(
                tb.permutation_test(pool[:8], pool[8:], n_perms=499, seed=trial).p_value
            )
        ps = np.array(ps)
        assert 0.25 < ps.mean() < 0.75
        assert (ps < 0.05).mean() <= 0.15

    def test_validation(self):
        a = np.ones((3, 2))
        with pytest.raises(DataError):
            tb.permutation_test(a, np.ones((3, 3)), seed=0)
        with pytest.raises(DataError):
            tb.permutation_test(a, np.empty((0, 2)), seed=0)
        with pytest.raises(ConfigError):
            tb.permutation_test(a, np.zeros((3, 2)), n_perms=0, seed=0)
        with pytest.raises(ConfigError):
            tb.permutation_test(a, np.zeros((3, 2)))
