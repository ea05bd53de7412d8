"""Global Mahalanobis-distance outlier filtering."""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, InvalidArgumentError
from .geometry import as_points

DEFAULT_SIGMA = 4.0
_MAX_CONDITION = 1e12


@dataclass
class MahalanobisModel:
    mean: np.ndarray
    covariance: np.ndarray
    inverse_covariance: np.ndarray


@dataclass
class FilterReport:
    kept: int
    removed: int
    sigma: float

    def to_dict(self):
        return {"kept": self.kept, "removed": self.removed, "sigma": self.sigma}


def _points_of(cloud):
    return getattr(cloud, "points", cloud)


def fit_mahalanobis(cloud):
    """Fit the centroid and sample covariance (``n - 1`` denominator) of a cloud."""
    X = as_points(_points_of(cloud), "points")
    if len(X) < 4:
        raise DegenerateGeometryError(f"need at least 4 points for a covariance model, got {len(X)}")
    mean = X.mean(axis=0)
    D = X - mean
    H = (D.T @ D) / (len(X) - 1)
    H = 0.5 * (H + H.T)
    eig = np.linalg.eigvalsh(H)
    if eig[0] <= 0.0 or eig[-1] / eig[0] > _MAX_CONDITION:
        raise DegenerateGeometryError(
            "covariance is singular or ill-conditioned (points are collinear or coplanar)"
        )
    return MahalanobisModel(mean, H, np.linalg.inv(H))


def mahalanobis_distance(model, p):
    """Distance(s) ``sqrt((p - mean)^T H^-1 (p - mean))``; accepts one point or an (n, 3) array."""
    P = np.asarray(p, dtype=np.float64)
    single = P.ndim == 1
    D = P.reshape(-1, 3) - model.mean
    d2 = np.einsum("ij,jk,ik->i", D, model.inverse_covariance, D)
    d = np.sqrt(np.maximum(d2, 0.0))
    return float(d[0]) if single else d


def inlier_mask(cloud, sigma, model=None):
    if not sigma > 0:
        raise InvalidArgumentError(f"sigma must be positive, got {sigma}")
    if model is None:
        model = fit_mahalanobis(cloud)
    return mahalanobis_distance(model, _points_of(cloud)) <= sigma


def filter_outliers(cloud, sigma=DEFAULT_SIGMA):
    """Keep points within ``sigma`` Mahalanobis units of the cloud's own model.

    Point order and colors of the kept points are preserved.
    """
    mask = inlier_mask(cloud, sigma)
    kept = cloud.subset(mask)
    report = FilterReport(int(mask.sum()), int((~mask).sum()), float(sigma))
    return kept, report
