import numpy as np
import pytest

from clusterreg.core import PointSet
from clusterreg.errors import DimensionMismatch, EmptyCorrespondence
from clusterreg.metrics import (
    Correspondence,
    add_noise,
    identity_pairs,
    nearest_neighbor_pairs,
    occlude,
    rmse,
    synthetic_warp,
)


class TestRmse:
    def test_single_pair_is_distance(self):
        a = PointSet([[0.0, 0.0]])
        b = PointSet([[3.0, 4.0]])
        assert rmse(a, b, identity_pairs(1)) == pytest.approx(5.0)

    def test_identical_sets_zero(self, rng):
        ps = PointSet(rng.normal(size=(20, 3)))
        assert rmse(ps, ps, identity_pairs(20)) == 0.0

    def test_uniform_offset(self, rng):
        a = PointSet(rng.normal(size=(10, 2)))
        b = PointSet(a.points + np.array([0.6, 0.8]))
        assert rmse(a, b, identity_pairs(10)) == pytest.approx(1.0)

    def test_symmetric_in_arguments(self, rng):
        a = PointSet(rng.normal(size=(15, 2)))
        b = PointSet(rng.normal(size=(15, 2)))
        assert rmse(a, b, identity_pairs(15)) == rmse(b, a, identity_pairs(15))

    def test_matches_manual_mean(self, rng):
        a = PointSet(rng.normal(size=(8, 3)))
        b = PointSet(rng.normal(size=(8, 3)))
        manual = np.sqrt(np.mean([np.sum((a.points[i] - b.points[i]) ** 2) for i in range(8)]))
        assert rmse(a, b, identity_pairs(8)) == pytest.approx(manual, rel=1e-12)

    def test_empty_pairs_rejected(self, rng):
        ps = PointSet(rng.normal(size=(5, 2)))
        empty = Correspondence(np.empty((0, 2), dtype=np.int64))
        with pytest.raises(EmptyCorrespondence):
            rmse(ps, ps, empty)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            rmse(
                PointSet(rng.normal(size=(3, 2))),
                PointSet(rng.normal(size=(3, 3))),
                identity_pairs(3),
            )


class TestNearestNeighborPairs:
    def test_matches_brute_force(self, rng):
        a = PointSet(rng.normal(size=(40, 3)))
        b = PointSet(rng.normal(size=(25, 3)))
        corr = nearest_neighbor_pairs(a, b)
        D = ((a.points[:, None, :] - b.points[None, :, :]) ** 2).sum(axis=2)
        np.testing.assert_array_equal(corr.pairs[:, 1], D.argmin(axis=1))
        np.testing.assert_array_equal(corr.pairs[:, 0], np.arange(40))

    def test_ties_pick_lowest_index(self):
        a = PointSet([[0.0, 0.0]])
        b = PointSet([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])
        corr = nearest_neighbor_pairs(a, b)
        assert corr.pairs[0, 1] == 0

    def test_self_nn_is_identity(self, rng):
        # distinct random points: each point is its own nearest neighbor
        ps = PointSet(rng.normal(size=(30, 2)))
        corr = nearest_neighbor_pairs(ps, ps)
        np.testing.assert_array_equal(corr.pairs[:, 0], corr.pairs[:, 1])

    def test_blocked_path(self, rng):
        # more points than one processing block
        a = PointSet(rng.normal(size=(1100, 2)))
        b = PointSet(rng.normal(size=(50, 2)))
        corr = nearest_neighbor_pairs(a, b)
        D = ((a.points[:, None, :] - b.points[None, :, :]) ** 2).sum(axis=2)
        np.testing.assert_array_equal(corr.pairs[:, 1], D.argmin(axis=1))


class TestAddNoise:
    def test_sigma_zero_identical(self, rng):
        ps = PointSet(rng.normal(size=(10, 2)))
        np.testing.assert_array_equal(add_noise(ps, 0.0).points, ps.points)

    def test_deterministic_per_seed(self, rng):
        ps = PointSet(rng.normal(size=(10, 2)))
        np.testing.assert_array_equal(add_noise(ps, 0.1, seed=3).points, add_noise(ps, 0.1, seed=3).points)
        assert not np.array_equal(add_noise(ps, 0.1, seed=3).points, add_noise(ps, 0.1, seed=4).points)

    def test_empirical_std(self, rng):
        ps = PointSet(np.zeros((20000, 3)))
        noisy = add_noise(ps, 0.05, seed=0)
        assert abs(noisy.points.std() - 0.05) / 0.05 < 0.05

    def test_negative_sigma_rejected(self, rng):
        with pytest.raises(ValueError):
            add_noise(PointSet(rng.normal(size=(5, 2))), -0.1)


class TestOcclude:
    def test_fraction_zero_identical(self, rng):
        ps = PointSet(rng.normal(size=(10, 2)))
        np.testing.assert_array_equal(occlude(ps, 0.0).points, ps.points)

    def test_removes_rounded_count(self, rng):
        ps = PointSet(rng.normal(size=(100, 2)))
        assert len(occlude(ps, 0.3)) == 70
        assert len(occlude(ps, 0.25, seed=1)) == 75

    def test_survivors_keep_order(self, rng):
        ps = PointSet(rng.normal(size=(50, 2)))
        out = occlude(ps, 0.2, seed=0)
        # every surviving row appears in the original, in the same order
        idx = [int(np.flatnonzero((ps.points == row).all(axis=1))[0]) for row in out.points]
        assert idx == sorted(idx)

    def test_deterministic(self, rng):
        ps = PointSet(rng.normal(size=(60, 2)))
        np.testing.assert_array_equal(occlude(ps, 0.4, seed=5).points, occlude(ps, 0.4, seed=5).points)

    def test_invalid_fraction(self, rng):
        ps = PointSet(rng.normal(size=(5, 2)))
        with pytest.raises(ValueError):
            occlude(ps, 1.0)
        with pytest.raises(ValueError):
            occlude(ps, -0.1)


class TestSyntheticWarp:
    def test_magnitude_zero_identity(self, rng):
        ps = PointSet(rng.normal(size=(20, 2)))
        warped, corr = synthetic_warp(ps, 0.0)
        np.testing.assert_array_equal(warped.points, ps.points)
        np.testing.assert_array_equal(corr.pairs[:, 0], corr.pairs[:, 1])

    def test_peak_displacement_equals_magnitude(self, rng):
        ps = PointSet(rng.normal(size=(200, 3)))
        warped, _ = synthetic_warp(ps, 0.3, seed=2)
        disp = np.linalg.norm(warped.points - ps.points, axis=1)
        assert disp.max() == pytest.approx(0.3, rel=1e-12)

    def test_identity_pairing(self, rng):
        ps = PointSet(rng.normal(size=(30, 2)))
        _, corr = synthetic_warp(ps, 0.2, seed=0)
        np.testing.assert_array_equal(corr.pairs, np.stack([np.arange(30)] * 2, axis=1))

    def test_deterministic_per_seed(self, rng):
        ps = PointSet(rng.normal(size=(50, 2)))
        a, _ = synthetic_warp(ps, 0.25, seed=7)
        b, _ = synthetic_warp(ps, 0.25, seed=7)
        np.testing.assert_array_equal(a.points, b.points)
        c, _ = synthetic_warp(ps, 0.25, seed=8)
        assert not np.array_equal(a.points, c.points)

    def test_smoothness(self, rng):
        # nearby points receive nearby displacements
        base = rng.normal(size=(100, 2))
        ps = PointSet(base)
        near = PointSet(base + 1e-4)
        wa, _ = synthetic_warp(ps, 0.3, seed=0)
        wb, _ = synthetic_warp(near, 0.3, seed=0)
        da = wa.points - ps.points
        db = wb.points - near.points
        assert np.abs(da - db).max() < 1e-2

    def test_negative_magnitude_rejected(self, rng):
        with pytest.raises(ValueError):
            synthetic_warp(PointSet(rng.normal(size=(5, 2))), -0.1)
