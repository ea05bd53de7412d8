"""Seeded synthetic scenes of planar faces with known orientations."""

import math
from dataclasses import dataclass, field

import numpy as np

from .cloud_io import GroundTruthSurface, PointCloud
from .errors import InvalidArgumentError
from .orientation import normal_from_orientation, orientation_from_normal, upward


@dataclass
class Face:
    """A planar rectangle: ``center + a*u_axis + b*v_axis``, |a| <= width/2, |b| <= height/2."""

    center: np.ndarray
    u_axis: np.ndarray
    v_axis: np.ndarray
    width: float
    height: float
    id: int = 0

    @property
    def normal(self):
        n = np.cross(self.u_axis, self.v_axis)
        return n / np.linalg.norm(n)

    def corners(self):
        hw, hh = 0.5 * self.width, 0.5 * self.height
        return np.array([self.center + a * hw * self.u_axis + b * hh * self.v_axis
                         for a, b in ((-1, -1), (1, -1), (1, 1), (-1, 1))])


@dataclass
class SyntheticScene:
    faces: list
    points_per_face: int = 10_000
    noise_fraction: float = 0.0
    outlier_fraction: float = 0.0
    outlier_inflation: float = 8.0
    seed: int = 0

    def extent(self):
        corners = np.vstack([f.corners() for f in self.faces])
        return float(np.ptp(corners, axis=0).max())


@dataclass
class SyntheticSample:
    cloud: PointCloud
    truth: list
    face_labels: np.ndarray  # face id per point, -1 for planted outliers
    noise_sigma: float = 0.0
    scene: SyntheticScene = field(default=None, repr=False)

    @property
    def outlier_mask(self):
        return self.face_labels < 0


def oriented_face(dip_deg, dipdir_deg, width, height, base_center, id=0):
    """Face of the given attitude; ``width`` runs along strike, ``height`` up the dip line."""
    n = normal_from_orientation(dip_deg, dipdir_deg)
    strike = math.radians(dipdir_deg - 90.0)
    u = np.array([math.cos(strike), -math.sin(strike), 0.0])
    v = np.cross(n, u)  # up-dip unit vector
    if v[2] < 0:
        v = -v
        u = -u
    center = np.asarray(base_center, dtype=np.float64) + 0.5 * height * v
    return Face(center, u, v, float(width), float(height), id)


def box_scene(size=1.0, open_top=False, **kwargs):
    """Axis-aligned cube of edge ``size`` with its base on z = 0."""
    h = 0.5 * size
    c = np.array([h, h, h])
    ex, ey, ez = np.eye(3)
    specs = [
        (c - h * ez, ex, ey),  # bottom
        (c + h * ez, ex, ey),  # top
        (c - h * ex, ey, ez),
        (c + h * ex, ey, ez),
        (c - h * ey, ex, ez),
        (c + h * ey, ex, ez),
    ]
    if open_top:
        del specs[1]
    faces = [Face(ctr, u, v, size, size, i + 1) for i, (ctr, u, v) in enumerate(specs)]
    return SyntheticScene(faces, **kwargs)


def prism_scene(sides=5, radius=5.0, height=3.0, **kwargs):
    """Vertical regular prism (walls only) centred on the origin."""
    if sides < 3:
        raise InvalidArgumentError("a prism needs at least 3 sides")
    width = 2.0 * radius * math.sin(math.pi / sides)
    apothem = radius * math.cos(math.pi / sides)
    faces = []
    for i in range(sides):
        a = 2.0 * math.pi * i / sides
        out = np.array([math.cos(a), math.sin(a), 0.0])
        u = np.array([-math.sin(a), math.cos(a), 0.0])
        faces.append(Face(apothem * out + np.array([0, 0, 0.5 * height]), u,
                          np.array([0.0, 0.0, 1.0]), width, height, i + 1))
    return SyntheticScene(faces, **kwargs)


# Field attitudes (dip, dipdir) of the six reference surfaces, keyed by id.
FIELD_ATTITUDES = {1: (89, 177), 2: (89, 94), 3: (87, 69), 4: (86, 192), 5: (89, 80), 6: (40, 89)}

# Outward facing azimuth of each wall around the tower footprint. Wall 4 is
# flipped relative to its tabulated dip direction so that the five walls close.
_TOWER_FACING = {4: 12.0, 3: 249.0, 2: 274.0, 1: 177.0, 5: 80.0}


def _closed_footprint(facing, side):
    """Pentagon vertices whose edges run perpendicular to each facing azimuth.

    Edge lengths are the least-squares closest lengths to ``side`` that make
    the polygon close.
    """
    tangents = []
    for az in facing:
        a = math.radians(az)
        tangents.append((math.sin(a), math.cos(a)))
    t = np.array(tangents)
    lengths = np.full(len(facing), float(side))
    lengths = lengths - t @ np.linalg.solve(t.T @ t, t.T @ lengths)
    verts = np.vstack([np.zeros(2), np.cumsum(lengths[:, None] * t, axis=0)[:-1]])
    return verts - verts.mean(axis=0)


def observatory_scene(points_per_face=10_000, noise_fraction=0.003, outlier_fraction=0.02,
                      seed=0, side=12.0, wall_height=12.0, gap=1.5, roof=(14.0, 12.0), **kwargs):
    """Five near-vertical walls and one 40-degree roof at the field attitudes.

    The walls form a closed pentagonal tower, each trimmed by ``gap`` at both
    ends so neighbouring walls do not share voxels. The roof floats half a
    unit above the wall tops. Face ids follow :data:`FIELD_ATTITUDES`.
    """
    order = sorted(_TOWER_FACING, key=_TOWER_FACING.get)
    verts = _closed_footprint([_TOWER_FACING[i] for i in order], side)
    faces = []
    for j, sid in enumerate(order):
        a, b = verts[j], verts[(j + 1) % len(order)]
        mid = 0.5 * (a + b)
        width = float(np.linalg.norm(b - a)) - 2.0 * gap
        faces.append(oriented_face(*FIELD_ATTITUDES[sid], width, wall_height,
                                   base_center=(mid[0], mid[1], 0.0), id=sid))
    run = 0.5 * roof[1] * math.cos(math.radians(FIELD_ATTITUDES[6][0]))
    faces.append(oriented_face(*FIELD_ATTITUDES[6], roof[0], roof[1],
                               base_center=(0.0, -run, wall_height + 0.5), id=6))
    faces.sort(key=lambda f: f.id)
    return SyntheticScene(faces, points_per_face=points_per_face, noise_fraction=noise_fraction,
                          outlier_fraction=outlier_fraction, seed=seed, **kwargs)


def face_truth(face):
    o = orientation_from_normal(upward(face.normal))
    strike = 0.0 if o.strike_deg is None else o.strike_deg
    dipdir = 90.0 if o.dipdir_deg is None else o.dipdir_deg
    return GroundTruthSurface(face.id, strike, o.dip_deg, dipdir, o.source_normal)


def generate_synthetic(scene):
    """Sample a scene into a point cloud plus matching ground truth.

    Points are uniform over each face, displaced along the face normal by
    Gaussian noise of ``noise_fraction * extent``; planted outliers are uniform
    in the scene box scaled by ``outlier_inflation`` about its centre.
    """
    if not scene.faces:
        raise InvalidArgumentError("scene has no faces")
    if scene.points_per_face < 1:
        raise InvalidArgumentError("points_per_face must be positive")
    rng = np.random.default_rng(scene.seed)
    sigma = scene.noise_fraction * scene.extent()
    chunks, labels = [], []
    for face in scene.faces:
        m = scene.points_per_face
        a = rng.uniform(-0.5, 0.5, m) * face.width
        b = rng.uniform(-0.5, 0.5, m) * face.height
        pts = face.center + a[:, None] * face.u_axis + b[:, None] * face.v_axis
        if sigma > 0:
            pts = pts + rng.normal(0.0, sigma, m)[:, None] * face.normal
        chunks.append(pts)
        labels.append(np.full(m, face.id))
    surface = np.vstack(chunks)
    n_out = int(round(scene.outlier_fraction * len(surface)))
    if n_out:
        lo, hi = surface.min(axis=0), surface.max(axis=0)
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo) * scene.outlier_inflation
        chunks.append(rng.uniform(mid - half, mid + half, size=(n_out, 3)))
        labels.append(np.full(n_out, -1))
    cloud = PointCloud(np.vstack(chunks))
    truth = [face_truth(f) for f in scene.faces]
    return SyntheticSample(cloud, truth, np.concatenate(labels), sigma, scene)
