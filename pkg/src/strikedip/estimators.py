"""scikit-learn style wrappers around the pipeline stages.

Each estimator takes an ``(n, 3)`` array of points (or a :class:`PointCloud`)
as ``X``. Hyperparameters live in ``__init__`` untouched, so ``get_params``,
``set_params`` and ``clone`` behave as usual; learned state carries a
trailing underscore.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .cloud_io import PointCloud
from .errors import InvalidArgumentError
from .noise_filter import DEFAULT_SIGMA, fit_mahalanobis, mahalanobis_distance
from .pipeline import RunConfig, extract_orientations
from .quality import score_orientations
from .segmentation import (DEFAULT_K, DEFAULT_MIN_REGION_SIZE, DEFAULT_PSI, DEFAULT_THETA_DEG,
                           GrowParams, grow_regions, knn_index, region_labels)
from .voxel_fit import DEFAULT_MIN_POINTS, DEFAULT_ZETA, build_grid, fit_all


def check_points(X, min_points=1):
    """Validate ``X`` as a finite float64 ``(n, 3)`` array; colors of a PointCloud are dropped."""
    if isinstance(X, PointCloud):
        X = X.points
    try:
        X = check_array(X, dtype=np.float64, ensure_min_samples=min_points)
    except ValueError as exc:
        raise InvalidArgumentError(str(exc)) from exc
    if X.shape[1] != 3:
        raise InvalidArgumentError(f"expected 3 columns (x, y, z), got {X.shape[1]}")
    return X


class MahalanobisOutlierFilter(TransformerMixin, BaseEstimator):
    """Global Mahalanobis-distance filter.

    ``predict`` follows the outlier-detector convention: +1 for inliers, -1
    for outliers. ``transform`` returns the inlier rows of ``X``.
    """

    def __init__(self, sigma=DEFAULT_SIGMA):
        self.sigma = sigma

    def fit(self, X, y=None):
        if not self.sigma > 0:
            raise InvalidArgumentError(f"sigma must be positive, got {self.sigma}")
        X = check_points(X, min_points=4)
        model = fit_mahalanobis(X)
        self.location_ = model.mean
        self.covariance_ = model.covariance
        self.precision_ = model.inverse_covariance
        self._model = model
        self.n_features_in_ = 3
        return self

    def score_samples(self, X):
        """Mahalanobis distance of each point under the fitted model."""
        check_is_fitted(self, "location_")
        return mahalanobis_distance(self._model, check_points(X))

    def predict(self, X):
        return np.where(self.score_samples(X) <= self.sigma, 1, -1)

    def transform(self, X):
        X = check_points(X)
        return X[self.score_samples(X) <= self.sigma]


class VoxelPlaneFitter(BaseEstimator):
    """Voxelize a cloud and fit one total-least-squares plane per occupied voxel."""

    def __init__(self, zeta=DEFAULT_ZETA, min_points=DEFAULT_MIN_POINTS, threads=1):
        self.zeta = zeta
        self.min_points = min_points
        self.threads = threads

    def fit(self, X, y=None):
        X = check_points(X)
        self.grid_ = build_grid(X, self.zeta)
        self.diagnostics_ = {}
        self.planes_ = fit_all(self.grid_, X, self.min_points, threads=self.threads,
                               diagnostics=self.diagnostics_)
        self.n_features_in_ = 3
        return self

    @property
    def centroids_(self):
        check_is_fitted(self, "planes_")
        return np.array([p.centroid for p in self.planes_]).reshape(-1, 3)

    @property
    def normals_(self):
        check_is_fitted(self, "planes_")
        return np.array([p.normal for p in self.planes_]).reshape(-1, 3)


class RegionGrower(BaseEstimator):
    """Group voxel planes into coplanar regions.

    ``fit`` accepts either a list of voxel planes or raw points; raw points
    are voxel-fitted first with ``zeta``. ``labels_`` holds one region id per
    voxel plane, -1 for planes left unsegmented.
    """

    def __init__(self, theta_deg=DEFAULT_THETA_DEG, psi=DEFAULT_PSI, k=DEFAULT_K,
                 min_region_size=DEFAULT_MIN_REGION_SIZE, zeta=DEFAULT_ZETA, threads=1):
        self.theta_deg = theta_deg
        self.psi = psi
        self.k = k
        self.min_region_size = min_region_size
        self.zeta = zeta
        self.threads = threads

    def fit(self, X, y=None):
        if isinstance(X, (list, tuple)) and (not X or hasattr(X[0], "normal")):
            planes = list(X)
        else:
            planes = VoxelPlaneFitter(self.zeta, threads=self.threads).fit(X).planes_
        params = GrowParams(self.theta_deg, self.psi, int(self.k), self.min_region_size)
        neighbors = knn_index(planes, params.k, threads=self.threads) if planes else None
        self.planes_ = planes
        self.regions_ = grow_regions(planes, params, neighbors=neighbors)
        self.labels_ = region_labels(self.regions_, len(planes))
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_


class PlanarOrientationExtractor(BaseEstimator):
    """Full pipeline: filter, voxel fit, region growing, region planes, orientation.

    After ``fit``, ``orientations_`` lists ``(region_id, PlanarOrientation)``
    pairs largest region first and ``timings_`` holds stage wall-clock seconds.
    """

    def __init__(self, zeta=DEFAULT_ZETA, theta_deg=DEFAULT_THETA_DEG, psi=DEFAULT_PSI,
                 k=DEFAULT_K, sigma=DEFAULT_SIGMA, min_points=DEFAULT_MIN_POINTS,
                 min_region_size=DEFAULT_MIN_REGION_SIZE, psi_relative=False,
                 weighted_normals=True, threads=1):
        self.zeta = zeta
        self.theta_deg = theta_deg
        self.psi = psi
        self.k = k
        self.sigma = sigma
        self.min_points = min_points
        self.min_region_size = min_region_size
        self.psi_relative = psi_relative
        self.weighted_normals = weighted_normals
        self.threads = threads

    def to_config(self):
        return RunConfig(**{name: getattr(self, name) for name in self.get_params()})

    def fit(self, X, y=None):
        cloud = X if isinstance(X, PointCloud) else PointCloud(check_points(X))
        result = extract_orientations(cloud, self.to_config())
        self.result_ = result
        self.region_planes_ = result.region_planes
        self.orientations_ = result.orientations
        self.timings_ = result.timings
        self.n_regions_ = len(result.regions)
        self.n_features_in_ = 3
        return self

    def evaluate(self, truth):
        """Quality breakdown of the fitted orientations against ground-truth surfaces."""
        check_is_fitted(self, "orientations_")
        return score_orientations(self.orientations_, truth)

    def score(self, X, truth):
        """Negated run score, so that higher is better as scikit-learn expects."""
        return -self.fit(X).evaluate(truth).z_run
