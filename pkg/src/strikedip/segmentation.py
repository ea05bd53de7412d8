"""k-nearest-neighbour region growing over voxel planes."""

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvalidArgumentError

DEFAULT_THETA_DEG = 6.0
DEFAULT_PSI = 0.1
DEFAULT_K = 7
DEFAULT_MIN_REGION_SIZE = 10


@dataclass(frozen=True)
class GrowParams:
    theta_deg: float = DEFAULT_THETA_DEG
    psi: float = DEFAULT_PSI
    k: int = DEFAULT_K
    min_region_size: int = DEFAULT_MIN_REGION_SIZE

    def __post_init__(self):
        if not 0.0 <= self.theta_deg <= 90.0:
            raise InvalidArgumentError(f"theta_deg must lie in [0, 90], got {self.theta_deg}")
        if not self.psi >= 0.0:
            raise InvalidArgumentError(f"psi must be non-negative, got {self.psi}")
        if int(self.k) != self.k or self.k < 1:
            raise InvalidArgumentError(f"k must be a positive integer, got {self.k}")
        if self.min_region_size < 1:
            raise InvalidArgumentError("min_region_size must be at least 1")


@dataclass
class Region:
    id: int
    members: list
    seed_history: list
    admitted_by: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.members)


def _centroids(planes):
    if isinstance(planes, np.ndarray):
        return np.asarray(planes, dtype=np.float64).reshape(-1, 3)
    return np.array([p.centroid for p in planes], dtype=np.float64).reshape(-1, 3)


def knn_index(planes, k, threads=1):
    """k nearest centroids for every plane (self excluded), nearest first.

    Returns an ``(n, min(k, n - 1))`` integer array. Equal distances are
    ordered by lower index, including at the k-th boundary.
    """
    if k < 1:
        raise InvalidArgumentError(f"k must be at least 1, got {k}")
    C = _centroids(planes)
    n = len(C)
    if n == 0:
        raise InvalidArgumentError("knn_index needs at least one plane")
    kk = min(int(k), n - 1)
    if kk == 0:
        return np.empty((n, 0), dtype=np.intp)
    tree = cKDTree(C)
    dist, _ = tree.query(C, kk + 1, workers=max(1, int(threads)))
    # A ball of radius d_(k+1) holds every candidate that could tie at the boundary.
    radius = dist[:, -1] * (1.0 + 1e-9) + 1e-300
    balls = tree.query_ball_point(C, radius, workers=max(1, int(threads)))
    out = np.empty((n, kk), dtype=np.intp)
    for i, cand in enumerate(balls):
        cand = np.asarray(cand, dtype=np.intp)
        cand = cand[cand != i]
        d2 = ((C[cand] - C[i]) ** 2).sum(axis=1)
        order = np.lexsort((cand, d2))
        out[i] = cand[order[:kk]]
    return out


def grow_regions(planes, params=None, neighbors=None, threads=1):
    """Group voxel planes into regions by seeded growth over the kNN graph.

    Seeds are taken in ascending order of fit residual. A neighbour joins the
    current region when its normal is within ``theta`` of the admitting seed's
    normal; it is promoted to a seed itself when its centroid lies within
    ``psi`` of the admitting seed's plane. Regions smaller than
    ``min_region_size`` are dropped; the rest are returned largest first.
    """
    params = params or GrowParams()
    n = len(planes)
    if n == 0:
        return []
    if neighbors is None:
        neighbors = knn_index(planes, params.k, threads=threads)
    normals = np.array([p.normal for p in planes])
    C = _centroids(planes)
    residuals = np.array([p.residual for p in planes])
    cos_theta = math.cos(math.radians(params.theta_deg))

    assigned = np.zeros(n, dtype=bool)
    grown = []
    for seed in np.lexsort((np.arange(n), residuals)):
        seed = int(seed)
        if assigned[seed]:
            continue
        assigned[seed] = True
        members = [seed]
        history = [seed]
        admitted = {seed: seed}
        queue = deque([seed])
        while queue:
            s = queue.popleft()
            ns, cs = normals[s], C[s]
            for nb in neighbors[s]:
                nb = int(nb)
                if assigned[nb]:
                    continue
                if abs(float(ns @ normals[nb])) < cos_theta and params.theta_deg < 90.0:
                    continue
                assigned[nb] = True
                members.append(nb)
                admitted[nb] = s
                if abs(float((C[nb] - cs) @ ns)) <= params.psi:
                    queue.append(nb)
                    history.append(nb)
        grown.append((members, history, admitted))

    kept = [g for g in grown if len(g[0]) >= params.min_region_size]
    # stable: equal sizes keep growth order
    kept.sort(key=lambda g: -len(g[0]))
    return [Region(i, sorted(m), h, a) for i, (m, h, a) in enumerate(kept)]


def region_labels(regions, n_planes):
    """Per-plane region id, ``-1`` for planes left in the unsegmented pool."""
    labels = np.full(n_planes, -1, dtype=np.intp)
    for r in regions:
        labels[r.members] = r.id
    return labels
