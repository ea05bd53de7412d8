import numpy as np
import pytest
from sklearn.base import clone

from strikedip.errors import InvalidArgumentError
from strikedip.estimators import (MahalanobisOutlierFilter, PlanarOrientationExtractor,
                                  RegionGrower, VoxelPlaneFitter, check_points)
from strikedip.noise_filter import inlier_mask
from strikedip.synthetic import box_scene, generate_synthetic


@pytest.fixture(scope="module")
def sample():
    return generate_synthetic(box_scene(points_per_face=6000, outlier_fraction=0.01, seed=2))


def test_check_points():
    with pytest.raises(InvalidArgumentError):
        check_points(np.zeros((4, 2)))
    with pytest.raises(InvalidArgumentError):
        check_points([[0, 0, np.nan]])
    assert check_points([[1, 2, 3]]).dtype == np.float64


def test_params_round_trip_and_clone():
    est = PlanarOrientationExtractor(theta_deg=9.0, k=11)
    assert est.get_params()["theta_deg"] == 9.0
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est
    est.set_params(psi=0.3)
    assert est.to_config().psi == 0.3


def test_outlier_filter_matches_function(sample):
    f = MahalanobisOutlierFilter(sigma=4.0).fit(sample.cloud)
    mask = inlier_mask(sample.cloud, 4.0)
    np.testing.assert_array_equal(f.predict(sample.cloud) == 1, mask)
    np.testing.assert_array_equal(f.transform(sample.cloud.points), sample.cloud.points[mask])
    assert f.score_samples(f.location_[None, :])[0] == pytest.approx(0.0, abs=1e-12)


def test_outlier_filter_unfitted():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        MahalanobisOutlierFilter().predict(np.zeros((3, 3)))


def test_voxel_fitter_and_grower(sample):
    X = MahalanobisOutlierFilter().fit_transform(sample.cloud.points)
    fitter = VoxelPlaneFitter(zeta=0.05).fit(X)
    assert fitter.centroids_.shape == fitter.normals_.shape == (len(fitter.planes_), 3)
    labels = RegionGrower().fit_predict(fitter.planes_)
    assert labels.shape == (len(fitter.planes_),)
    assert len(set(labels.tolist()) - {-1}) == 6
    direct = RegionGrower(zeta=0.05).fit(X)
    np.testing.assert_array_equal(direct.labels_, labels)


def test_extractor_end_to_end(sample):
    est = PlanarOrientationExtractor().fit(sample.cloud)
    assert est.n_regions_ == 6
    q = est.evaluate(sample.truth)
    assert len(q.matching) == 6 and q.z_run <= 0.05
    assert est.score(sample.cloud.points, sample.truth) == pytest.approx(-q.z_run)
    assert est.timings_["region_growing"] <= est.timings_["total"]
