"""Bounded rectangular region planes: ideal plane, region-space frame, minimum-perimeter search."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, InvalidArgumentError
from .geometry import (as_points, canonical_sign, normalize, rodrigues_rotation,
                       symmetric_eigh)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
HALF_PI = 0.5 * math.pi
COARSE_SAMPLES = 16
PHI_TOL = 1e-4


@dataclass
class IdealPlane:
    origin: np.ndarray
    normal: np.ndarray
    u_axis: np.ndarray
    v_axis: np.ndarray


@dataclass
class RegionPlane:
    region_id: int
    center: np.ndarray
    normal: np.ndarray
    axes: tuple
    half_extents: tuple
    phi_star: float
    perimeter: float
    point_count: int = 0

    def corners(self):
        a, b = self.axes
        ha, hb = self.half_extents
        return np.array([self.center + sa * ha * a + sb * hb * b
                         for sa, sb in ((-1, -1), (1, -1), (1, 1), (-1, 1))])

    def to_dict(self):
        return {
            "region_id": self.region_id,
            "center": [float(c) for c in self.center],
            "normal": [float(c) for c in self.normal],
            "axes": [[float(c) for c in a] for a in self.axes],
            "half_extents": [float(h) for h in self.half_extents],
            "phi_star_rad": float(self.phi_star),
            "perimeter": float(self.perimeter),
            "point_count": int(self.point_count),
        }


def in_plane_basis(normal):
    """Orthonormal (u, v) with u from the world axis least aligned with ``normal``."""
    n = np.asarray(normal, dtype=np.float64)
    axis = int(np.argmin(np.abs(n)))
    e = np.zeros(3)
    e[axis] = 1.0
    u = normalize(e - (e @ n) * n)
    v = np.cross(n, u)
    return u, v


def _refit_centroids(C, w):
    mean = (w[:, None] * C).sum(axis=0) / w.sum()
    D = C - mean
    S = (w[:, None] * D).T @ D
    vals, vecs = symmetric_eigh(S)
    if len(C) < 3 or vals[1] <= 1e-12 * max(vals[2], 1e-300):
        raise DegenerateGeometryError("region normals cancel and centroids do not span a plane")
    return vecs[:, 0]


def ideal_plane(region, planes, weighted=True):
    """Unbounded plane through a region: weighted centroid plus aggregated normal.

    The normal is the dominant eigenvector of the orientation tensor
    ``sum(w * n n^T)``, which is indifferent to each member's normal sign.
    """
    members = list(getattr(region, "members", region))
    if not members:
        raise InvalidArgumentError("region has no members")
    C = np.array([planes[i].centroid for i in members])
    N = np.array([planes[i].normal for i in members])
    w = np.array([planes[i].point_count if weighted else 1.0 for i in members], dtype=np.float64)
    origin = (w[:, None] * C).sum(axis=0) / w.sum()
    T = (w[:, None] * N).T @ N
    vals, vecs = symmetric_eigh(T)
    if vals[2] - vals[1] <= 1e-9 * vals[2]:
        normal = _refit_centroids(C, w)
    else:
        normal = vecs[:, 2]
    normal = canonical_sign(normalize(normal))
    u, v = in_plane_basis(normal)
    return IdealPlane(origin, normal, u, v)


def project_to_region_space(plane, points):
    """(beta, gamma, offset) of each point along (u, v, n) measured from the plane origin."""
    D = as_points(points, "points") - plane.origin
    return np.column_stack([D @ plane.u_axis, D @ plane.v_axis, D @ plane.normal])


def _rotated_extents(bg, phi):
    c, s = math.cos(phi), math.sin(phi)
    x = c * bg[:, 0] - s * bg[:, 1]
    y = s * bg[:, 0] + c * bg[:, 1]
    return x.min(), x.max(), y.min(), y.max()


def perimeter_at(coords, phi):
    """Perimeter of the axis-aligned bounding rectangle of in-plane coords rotated by ``phi``."""
    bg = np.asarray(coords, dtype=np.float64)[:, :2]
    if len(bg) == 0:
        raise InvalidArgumentError("perimeter_at needs at least one point")
    x0, x1, y0, y1 = _rotated_extents(bg, phi)
    return 2.0 * ((x1 - x0) + (y1 - y0))


def _perimeters(ring, phis):
    """perimeter_at for many angles in one broadcast; ``ring`` is small (hull vertices)."""
    c, s = np.cos(phis)[:, None], np.sin(phis)[:, None]
    x = c * ring[None, :, 0] - s * ring[None, :, 1]
    y = s * ring[None, :, 0] + c * ring[None, :, 1]
    return 2.0 * (np.ptp(x, axis=1) + np.ptp(y, axis=1))


def golden_section(f, a, b, tol=PHI_TOL):
    """Minimize ``f`` on ``[a, b]``; returns (x, f(x), evaluations)."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    best = (fc, c) if fc <= fd else (fd, d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            best = min(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            best = min(best, (fd, d))
        evals += 1
    return best[1], best[0], evals


def _interior_mask(bg):
    """Points strictly inside the polygon spanned by the eight axis and diagonal extremes.

    Such points cannot be hull vertices, so dropping them first leaves the
    hull unchanged while qhull sees far fewer points.
    """
    x, y = bg[:, 0], bg[:, 1]
    keys = (x, x + y, y, y - x, -x, -x - y, -y, x - y)
    order = [int(np.argmax(k)) for k in keys]
    poly = [i for j, i in enumerate(order) if i != order[j - 1]]
    if len(set(poly)) < 3:
        return np.zeros(len(bg), dtype=bool)
    inside = np.ones(len(bg), dtype=bool)
    V = bg[poly]
    for a, b in zip(V, np.roll(V, -1, axis=0)):
        inside &= (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]) > 0.0
    return inside


def _hull_ring(bg):
    """Convex-hull vertices of 2D points in order; the extreme pair when the set is flat."""
    from scipy.spatial import ConvexHull, QhullError

    if len(bg) > 64:
        bg = bg[~_interior_mask(bg)]
    try:
        return bg[ConvexHull(bg).vertices]
    except (QhullError, ValueError):
        return bg[[int(np.argmin(bg[:, 0])), int(np.argmax(bg[:, 0]))]]


def _hull_edge_angles(ring):
    """Rotation angles (mod 90 degrees) that bring a convex-hull edge onto an axis."""
    edges = np.roll(ring, -1, axis=0) - ring
    return np.mod(-np.arctan2(edges[:, 1], edges[:, 0]), HALF_PI)


def _fit_rectangle(bg, samples, tol):
    """Core of :func:`minimize_perimeter`; extents are relative to the mean of ``bg``."""
    offset = bg.mean(axis=0)
    # Rotated extents are attained on the hull, so evaluating there is exact.
    ring = _hull_ring(bg - offset)
    if np.ptp(ring, axis=0).max() == 0.0:
        raise DegenerateGeometryError("region points are coincident; no rectangle to bound")

    def f(phi):
        return perimeter_at(ring, phi)

    step = HALF_PI / samples
    grid = np.concatenate([np.arange(samples) * step, _hull_edge_angles(ring)])
    grid = np.unique(np.mod(grid, HALF_PI))
    vals = _perimeters(ring, grid)
    j = int(np.argmin(vals))
    best_phi, best_val = float(grid[j]), float(vals[j])
    lo = grid[j - 1] if j > 0 else grid[-1] - HALF_PI
    hi = grid[j + 1] if j + 1 < len(grid) else grid[0] + HALF_PI
    if hi - lo > tol:
        phi, val, _ = golden_section(f, lo, hi, tol)
        if val < best_val:
            best_phi, best_val = phi, val
    best_phi = float(best_phi % HALF_PI)
    return best_phi, _rotated_extents(ring, best_phi), offset


def minimize_perimeter(coords, samples=COARSE_SAMPLES, tol=PHI_TOL):
    """Find the in-plane rotation minimizing the bounding-rectangle perimeter.

    The perimeter is concave between the angles at which a convex-hull edge
    lies on an axis, so its minima sit at those angles. The coarse scan
    therefore evaluates ``samples`` uniform angles over the 90-degree period
    together with every edge-aligned angle; golden-section search then
    refines the bracket around the best candidate, and the better of the two
    is kept.

    Returns ``(phi_star, (half_width, half_height), perimeter)``.
    """
    bg = np.asarray(coords, dtype=np.float64)[:, :2]
    if len(bg) < 2:
        raise DegenerateGeometryError("need at least two points to bound a rectangle")
    phi, (x0, x1, y0, y1), _ = _fit_rectangle(bg, samples, tol)
    return phi, (0.5 * (x1 - x0), 0.5 * (y1 - y0)), 2.0 * ((x1 - x0) + (y1 - y0))


def region_points(region, planes):
    members = list(getattr(region, "members", region))
    parts = [planes[i].point_indices for i in members if planes[i].point_indices is not None]
    if not parts:
        return np.empty(0, dtype=np.intp)
    return np.sort(np.concatenate(parts))


def build_region_plane(region, planes, cloud, weighted=True):
    """Collapse a region into a bounded minimum-perimeter rectangle."""
    plane = ideal_plane(region, planes, weighted=weighted)
    idx = region_points(region, planes)
    X = np.asarray(getattr(cloud, "points", cloud), dtype=np.float64)
    if len(idx):
        pts = X[idx]
    else:
        pts = np.array([planes[i].centroid for i in region.members])
    if len(pts) < 2:
        raise DegenerateGeometryError("need at least two points to bound a rectangle")
    # only the in-plane coordinates matter here
    bg = (pts - plane.origin) @ np.column_stack([plane.u_axis, plane.v_axis])
    phi, (x0, x1, y0, y1), offset = _fit_rectangle(bg, COARSE_SAMPLES, PHI_TOL)
    half = (0.5 * (x1 - x0), 0.5 * (y1 - y0))
    perimeter = 2.0 * ((x1 - x0) + (y1 - y0))
    # Rotating coords by +phi equals rotating the frame by -phi about n.
    R = rodrigues_rotation(plane.normal, -phi)
    a1, a2 = R @ plane.u_axis, R @ plane.v_axis
    c, s = math.cos(phi), math.sin(phi)
    mid = (0.5 * (x0 + x1) + c * offset[0] - s * offset[1],
           0.5 * (y0 + y1) + s * offset[0] + c * offset[1])
    center = plane.origin + mid[0] * a1 + mid[1] * a2
    return RegionPlane(
        region_id=int(getattr(region, "id", 0)),
        center=center,
        normal=plane.normal,
        axes=(a1, a2),
        half_extents=half,
        phi_star=phi,
        perimeter=perimeter,
        point_count=len(pts),
    )
