"""Strike / dip / dip direction from plane normals (x = North, east = -y, z = up)."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import as_unit_vector

HORIZONTAL_DIP_DEG = 0.5


@dataclass(frozen=True)
class PlanarOrientation:
    strike_deg: Optional[float]
    dip_deg: float
    dipdir_deg: Optional[float]
    source_normal: tuple

    @property
    def defined(self):
        return self.dipdir_deg is not None

    def to_dict(self):
        return {
            "strike": self.strike_deg,
            "dip": self.dip_deg,
            "dipdir": self.dipdir_deg,
            "normal": list(self.source_normal),
        }


def _wrap360(deg):
    out = deg % 360.0
    return 0.0 if out >= 360.0 else out


def upward(n):
    """Return whichever of ``n``/``-n`` points up; horizontal normals break ties on +x, then +y."""
    n = np.asarray(n, dtype=np.float64)
    for c in (n[2], n[0], n[1]):
        if c != 0.0:
            return n if c > 0.0 else -n
    return n


def orientation_from_normal(normal):
    """Planar orientation of the plane with the given unit normal.

    Dip direction is the azimuth of the horizontal part of the upward normal,
    clockwise from North; strike follows the right-hand rule (dip direction
    minus 90 degrees). Both are None when the plane is within half a degree of
    horizontal.
    """
    n = upward(as_unit_vector(normal, "normal", tol=1e-6))
    dip = math.degrees(math.acos(max(-1.0, min(1.0, float(n[2])))))
    if dip < HORIZONTAL_DIP_DEG:
        return PlanarOrientation(None, dip, None, tuple(float(c) for c in n))
    dipdir = _wrap360(math.degrees(math.atan2(-n[1], n[0])))
    strike = _wrap360(dipdir - 90.0)
    return PlanarOrientation(strike, dip, dipdir, tuple(float(c) for c in n))


def normal_from_orientation(dip_deg, dipdir_deg):
    """Upward unit normal of a plane with the given dip and dip direction."""
    d, a = math.radians(dip_deg), math.radians(dipdir_deg)
    return np.array([math.sin(d) * math.cos(a), -math.sin(d) * math.sin(a), math.cos(d)])
