"""Uniform voxel grid over the point space and per-voxel total-least-squares planes."""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGeometryError, EmptyCloudError, InvalidArgumentError
from .geometry import as_points, symmetric_eigh, canonical_sign

DEFAULT_ZETA = 0.04
DEFAULT_MIN_POINTS = 3
_BOUNDS_MARGIN = 1e-9


class UnfittableError(DegenerateGeometryError):
    """Too few or collinear points for a plane fit."""


@dataclass
class VoxelGrid:
    bounds_min: np.ndarray
    bounds_max: np.ndarray
    zeta: float
    edge_length: float
    dims: tuple
    point_voxel: np.ndarray  # (n, 3) integer voxel index per point
    _occupancy: dict = field(default=None, repr=False)

    @property
    def occupancy(self):
        """Map ``(i, j, k)`` -> sorted array of point indices, built on first use."""
        if self._occupancy is None:
            keys = self.linear_keys()
            order = np.argsort(keys, kind="stable")
            uniq, starts = np.unique(keys[order], return_index=True)
            bounds = list(starts[1:]) + [len(order)]
            occ = {}
            for key, lo, hi in zip(uniq, starts, bounds):
                occ[self.unravel(int(key))] = order[lo:hi]
            self._occupancy = occ
        return self._occupancy

    def linear_keys(self):
        nx, ny, nz = self.dims
        v = self.point_voxel.astype(np.int64)
        return (v[:, 0] * ny + v[:, 1]) * nz + v[:, 2]

    def unravel(self, key):
        nx, ny, nz = self.dims
        return (key // (ny * nz), (key // nz) % ny, key % nz)


@dataclass
class VoxelPlane:
    voxel_index: tuple
    centroid: np.ndarray
    normal: np.ndarray
    residual: float
    point_count: int
    point_indices: np.ndarray = field(default=None, repr=False)


def build_grid(cloud, zeta=DEFAULT_ZETA):
    """Partition the cloud's bounding box into cubic voxels of edge ``zeta * longest extent``."""
    zeta = float(zeta)
    if not (0.0 < zeta <= 1.0):
        raise InvalidArgumentError(f"zeta must lie in (0, 1], got {zeta}")
    X = as_points(getattr(cloud, "points", cloud), "points")
    if len(X) == 0:
        raise EmptyCloudError("cannot voxelize an empty point cloud")
    lo, hi = X.min(axis=0), X.max(axis=0)
    extent = hi - lo
    margin = _BOUNDS_MARGIN * float(extent.max()) if extent.max() > 0 else _BOUNDS_MARGIN
    lo, hi = lo - margin, hi + margin
    extent = hi - lo
    edge = zeta * float(extent.max())
    dims = tuple(max(1, int(math.ceil(e / edge))) for e in extent)
    idx = np.floor((X - lo) / edge).astype(np.int64)
    idx = np.clip(idx, 0, np.array(dims) - 1)
    return VoxelGrid(lo, hi, zeta, edge, dims, idx)


def fit_voxel_plane(points, voxel_index=(0, 0, 0), point_indices=None):
    """Fit a plane through ``points`` by eigendecomposition of the centered scatter matrix.

    The residual is the smallest scatter eigenvalue divided by the point count,
    i.e. the mean squared distance of the points to the fitted plane.
    """
    X = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    n = len(X)
    if n < 3:
        raise UnfittableError(f"plane fit needs 3 points, got {n}")
    centroid = X.mean(axis=0)
    D = X - centroid
    S = D.T @ D
    vals, vecs = symmetric_eigh(S)
    if vals[1] <= 1e-12 * max(vals[2], 1e-300):
        raise UnfittableError("points are collinear or coincident")
    normal = canonical_sign(vecs[:, 0] / np.linalg.norm(vecs[:, 0]))
    residual = max(float(vals[0]), 0.0) / n
    return VoxelPlane(tuple(int(i) for i in voxel_index), centroid, normal, residual, n, point_indices)


def _fit_chunk(items, X, min_points):
    out = []
    for key, members in items:
        if len(members) < min_points:
            out.append(None)
            continue
        try:
            out.append(fit_voxel_plane(X[members], key, members))
        except UnfittableError:
            out.append(None)
    return out


def fit_all(grid, cloud, min_points=DEFAULT_MIN_POINTS, threads=1, diagnostics=None):
    """Fit one plane per occupied voxel holding at least ``min_points`` fittable points.

    Planes come back in lexicographic voxel-index order. Pass a dict as
    ``diagnostics`` to receive occupied/fitted/skipped counts and timing.
    """
    if min_points < 3:
        raise InvalidArgumentError("min_points must be at least 3")
    t0 = time.perf_counter()
    X = as_points(getattr(cloud, "points", cloud), "points")
    if len(X) != len(grid.point_voxel):
        raise InvalidArgumentError("grid was not built from this cloud")
    items = sorted(grid.occupancy.items())
    threads = max(1, int(threads))
    if threads == 1 or len(items) < 64:
        fitted = _fit_chunk(items, X, min_points)
    else:
        size = math.ceil(len(items) / threads)
        chunks = [items[i:i + size] for i in range(0, len(items), size)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            fitted = [p for part in pool.map(lambda c: _fit_chunk(c, X, min_points), chunks) for p in part]
    planes = [p for p in fitted if p is not None]
    if diagnostics is not None:
        diagnostics.update(
            occupied_voxels=len(items),
            fitted_voxels=len(planes),
            skipped_voxels=len(items) - len(planes),
            skipped_points=int(sum(len(m) for (_, m), p in zip(items, fitted) if p is None)),
            fit_seconds=time.perf_counter() - t0,
        )
    return planes
