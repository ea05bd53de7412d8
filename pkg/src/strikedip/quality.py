"""Normalized [0, 1] quality scores comparing measured orientations with ground truth."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .geometry import acute_angle
from .orientation import HORIZONTAL_DIP_DEG

STRIKE_RANGE = (0.0, 360.0)
DIP_RANGE = (0.0, 90.0)
DIPDIR_RANGE = (0.0, 360.0)
MAX_MATCH_ANGLE_DEG = 30.0


def _clamp01(x):
    return min(1.0, max(0.0, x))


def z_component(measured, truth, p_min, p_max, circular=False):
    """Normalized absolute difference of one orientation component.

    Circular components (strike, dip direction) use the shorter way round the
    compass. A missing measurement against a defined truth scores 1.
    """
    if not p_max > p_min:
        raise InvalidArgumentError("p_max must exceed p_min")
    if measured is None or truth is None:
        return 0.0 if measured is None and truth is None else 1.0
    diff = abs(float(measured) - float(truth))
    if circular:
        diff = diff % 360.0
        diff = min(diff, 360.0 - diff)
    return _clamp01((diff - p_min) / (p_max - p_min))


def z_region(z_strike, z_dip, z_dipdir):
    for z in (z_strike, z_dip, z_dipdir):
        if not 0.0 <= z <= 1.0:
            raise InvalidArgumentError(f"component scores must lie in [0, 1], got {z}")
    return (z_strike + z_dip + z_dipdir) / 3.0


def z_run(region_scores):
    """Root-sum-square of region scores divided by the region count.

    Note the worst case (every region scoring 1) is ``1/sqrt(n)``, not 1.
    """
    scores = [float(s) for s in region_scores]
    if not scores:
        raise InvalidArgumentError("z_run needs at least one region score")
    if any(not 0.0 <= s <= 1.0 for s in scores):
        raise InvalidArgumentError("region scores must lie in [0, 1]")
    return math.sqrt(sum(s * s for s in scores)) / len(scores)


def _normal_of(item):
    if hasattr(item, "source_normal"):
        return np.asarray(item.source_normal, dtype=np.float64)
    if hasattr(item, "normal"):
        return np.asarray(item.normal, dtype=np.float64)
    return np.asarray(item, dtype=np.float64)


def match_regions(measured, truth, max_angle_deg=MAX_MATCH_ANGLE_DEG):
    """Greedy minimum-angle one-to-one assignment of measured normals to truth normals.

    ``measured`` is a sequence of ``(region_id, normal-like)`` pairs, where the
    second item may be a PlanarOrientation, a RegionPlane or a raw vector.
    Returns ``{region_id: (truth_id, angle_deg)}``.
    """
    if not measured or not truth:
        raise InvalidArgumentError("match_regions needs nonempty measured and truth lists")
    pairs = []
    for mi, (_, item) in enumerate(measured):
        nm = _normal_of(item)
        for ti, t in enumerate(truth):
            angle = math.degrees(acute_angle(nm, np.asarray(t.normal)))
            pairs.append((angle, mi, ti))
    pairs.sort()
    used_m, used_t, matching = set(), set(), {}
    for angle, mi, ti in pairs:
        if angle > max_angle_deg:
            break
        if mi in used_m or ti in used_t:
            continue
        used_m.add(mi)
        used_t.add(ti)
        matching[measured[mi][0]] = (truth[ti].id, angle)
    return matching


@dataclass
class QualityBreakdown:
    entries: list
    z_run: float
    matching: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "z_run": self.z_run,
            "matching": {str(k): v for k, v in sorted(self.matching.items())},
            "surfaces": self.entries,
        }


def score_orientations(measured, truth, max_angle_deg=MAX_MATCH_ANGLE_DEG):
    """Match and score ``(region_id, PlanarOrientation)`` pairs against ground truth.

    Every truth surface contributes one region score; unmatched surfaces
    score 1.
    """
    if not truth:
        raise InvalidArgumentError("no ground-truth surfaces to score against")
    matching = match_regions(measured, truth, max_angle_deg) if measured else {}
    by_truth = {tid: (rid, ang) for rid, (tid, ang) in matching.items()}
    orient = dict(measured)
    entries = []
    for t in truth:
        if t.id in by_truth:
            rid, ang = by_truth[t.id]
            o = orient[rid]
            zd = z_component(o.dip_deg, t.dip_deg, *DIP_RANGE)
            if t.dip_deg < HORIZONTAL_DIP_DEG:
                # azimuths of a horizontal surface carry no information
                zs = zdd = 0.0
            else:
                zs = z_component(o.strike_deg, t.strike_deg, *STRIKE_RANGE, circular=True)
                zdd = z_component(o.dipdir_deg, t.dipdir_deg, *DIPDIR_RANGE, circular=True)
            entries.append({
                "truth_id": t.id, "region_id": rid, "angle_deg": ang,
                "measured": {"strike": o.strike_deg, "dip": o.dip_deg, "dipdir": o.dipdir_deg},
                "z_strike": zs, "z_dip": zd, "z_dipdir": zdd, "z_region": z_region(zs, zd, zdd),
            })
        else:
            entries.append({
                "truth_id": t.id, "region_id": None, "angle_deg": None, "measured": None,
                "z_strike": None, "z_dip": None, "z_dipdir": None, "z_region": 1.0,
            })
    total = z_run([e["z_region"] for e in entries])
    return QualityBreakdown(entries, total, {rid: tid for rid, (tid, _) in matching.items()})
