"""End-to-end orientation extraction, run reports, exports and parameter sweeps."""

import contextlib
import csv
import gc
import json
import logging
import math
import os
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from . import __version__
from .cloud_io import PointCloud, read_ground_truth, read_ply, write_ply
from .errors import (DegenerateGeometryError, EmptyCloudError, InvalidArgumentError, ParseError,
                     SchemaError, StageError, StrikeDipError)
from .noise_filter import DEFAULT_SIGMA, filter_outliers
from .orientation import orientation_from_normal
from .quality import score_orientations
from .region_plane import build_region_plane
from .segmentation import (DEFAULT_K, DEFAULT_MIN_REGION_SIZE, DEFAULT_PSI, DEFAULT_THETA_DEG,
                           GrowParams, grow_regions, knn_index, region_labels)
from .voxel_fit import DEFAULT_MIN_POINTS, DEFAULT_ZETA, build_grid, fit_all

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SWEEP_FACTORS = ("zeta", "theta", "psi", "k")
SWEEP_COLUMNS = ("schema_version", "factor", "value", "region_growing_seconds", "total_seconds",
                 "z_run", "region_count", "status", "error")


@dataclass
class RunConfig:
    input: Optional[str] = None
    truth: Optional[str] = None
    zeta: float = DEFAULT_ZETA
    theta_deg: float = DEFAULT_THETA_DEG
    psi: float = DEFAULT_PSI
    k: int = DEFAULT_K
    sigma: float = DEFAULT_SIGMA
    min_points: int = DEFAULT_MIN_POINTS
    min_region_size: int = DEFAULT_MIN_REGION_SIZE
    psi_relative: bool = False
    weighted_normals: bool = True
    rng_seed: int = 0
    out_dir: Optional[str] = None
    threads: int = 1
    binary_ply: bool = False

    def validate(self):
        if not (0.0 < self.zeta <= 1.0):
            raise InvalidArgumentError(f"zeta must lie in (0, 1], got {self.zeta}")
        if not (0.0 <= self.theta_deg <= 90.0):
            raise InvalidArgumentError(f"theta must lie in [0, 90], got {self.theta_deg}")
        if not self.psi >= 0.0:
            raise InvalidArgumentError(f"psi must be non-negative, got {self.psi}")
        if int(self.k) != self.k or self.k < 1:
            raise InvalidArgumentError(f"k must be a positive integer, got {self.k}")
        if not self.sigma > 0.0:
            raise InvalidArgumentError(f"sigma must be positive, got {self.sigma}")
        if self.min_points < 3:
            raise InvalidArgumentError("min_points must be at least 3")
        if self.min_region_size < 1:
            raise InvalidArgumentError("min_region_size must be at least 1")
        if self.threads < 1:
            raise InvalidArgumentError("threads must be at least 1")
        return self

    def echo(self):
        """Config fields that influence results (paths and thread count excluded)."""
        d = asdict(self)
        for key in ("input", "truth", "out_dir", "threads", "binary_ply"):
            d.pop(key)
        return d


@dataclass
class ExtractionResult:
    """In-memory outputs of every stage for one cloud."""

    filtered: PointCloud
    filter_report: object
    grid: object
    planes: list
    voxel_diagnostics: dict
    regions: list
    region_planes: list
    orientations: list  # (region_id, PlanarOrientation)
    timings: dict = field(default_factory=dict)
    effective_psi: float = 0.0


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StrikeDipError as exc:
        raise StageError(name, exc) from exc
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise StageError(name, DegenerateGeometryError(str(exc))) from exc


def extract_orientations(cloud, config):
    """Run filter, voxel fit, region growing, region planes and orientation on ``cloud``."""
    config.validate()
    timings = {}
    t_start = time.perf_counter()

    t = time.perf_counter()
    filtered, freport = _stage("filter", filter_outliers, cloud, config.sigma)
    timings["filter"] = time.perf_counter() - t

    t = time.perf_counter()
    if len(filtered) == 0:
        raise StageError("voxel_fit", EmptyCloudError("point cloud is empty after filtering"))
    grid = _stage("voxel_fit", build_grid, filtered, config.zeta)
    diagnostics = {}
    planes = _stage("voxel_fit", fit_all, grid, filtered, config.min_points,
                    threads=config.threads, diagnostics=diagnostics)
    diagnostics["edge_length"] = grid.edge_length
    diagnostics["dims"] = list(grid.dims)
    timings["voxel_fit"] = time.perf_counter() - t

    t = time.perf_counter()
    psi = config.psi * grid.edge_length if config.psi_relative else config.psi
    params = GrowParams(config.theta_deg, psi, int(config.k), config.min_region_size)
    if planes:
        neighbors = _stage("region_growing", knn_index, planes, params.k, threads=config.threads)
        regions = _stage("region_growing", grow_regions, planes, params, neighbors=neighbors)
    else:
        regions = []
    timings["region_growing"] = time.perf_counter() - t

    t = time.perf_counter()
    if config.threads > 1 and len(regions) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            rplanes = list(pool.map(
                lambda r: _stage("region_planes", build_region_plane, r, planes, filtered,
                                 weighted=config.weighted_normals), regions))
    else:
        rplanes = [_stage("region_planes", build_region_plane, r, planes, filtered,
                          weighted=config.weighted_normals) for r in regions]
    timings["region_planes"] = time.perf_counter() - t

    t = time.perf_counter()
    orientations = [(rp.region_id, _stage("orientation", orientation_from_normal, rp.normal))
                    for rp in rplanes]
    timings["orientation"] = time.perf_counter() - t
    timings["total"] = time.perf_counter() - t_start

    return ExtractionResult(filtered, freport, grid, planes, diagnostics, regions, rplanes,
                            orientations, timings, psi)


def build_report(config, result, truth=None):
    report = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "config": config.echo(),
        "filter": result.filter_report.to_dict(),
        "voxels": {k: v for k, v in result.voxel_diagnostics.items() if k != "fit_seconds"},
        "effective_psi": result.effective_psi,
        "counts": {
            "input_points": result.filter_report.kept + result.filter_report.removed,
            "voxel_planes": len(result.planes),
            "regions": len(result.regions),
            "unsegmented_planes": len(result.planes) - sum(len(r) for r in result.regions),
        },
        "regions": [
            {**rp.to_dict(), "voxel_planes": len(r), "orientation": o.to_dict()}
            for r, rp, (_, o) in zip(result.regions, result.region_planes, result.orientations)
        ],
        "timings": dict(result.timings),
    }
    if truth is not None:
        report["quality"] = score_orientations(result.orientations, truth).to_dict()
    return report


def strip_timings(report):
    """Copy of a report without wall-clock fields, for determinism comparisons."""
    out = json.loads(json.dumps(report))
    out.pop("timings", None)
    return out


def orientations_from_report(report):
    """``(region_id, PlanarOrientation)`` pairs recovered from a saved run report."""
    from .orientation import PlanarOrientation

    try:
        out = []
        for r in report["regions"]:
            o = r["orientation"]
            out.append((int(r["region_id"]), PlanarOrientation(
                o["strike"], float(o["dip"]), o["dipdir"], tuple(float(c) for c in o["normal"]))))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"report lacks region orientations: {exc}") from exc
    return out


def load_report(path):
    try:
        with open(path, encoding="utf-8") as fh:
            report = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc.msg}", exc.pos) from exc
    if not isinstance(report, dict) or report.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"{path}: not a schema_version {SCHEMA_VERSION} run report")
    return report


def dump_report(report, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def region_color(region_id):
    """Stable per-region RGB; the palette is seeded by the region id."""
    rng = np.random.default_rng(1_000_003 + int(region_id))
    return rng.integers(40, 256, size=3).astype(np.uint8)


UNSEGMENTED_COLOR = np.array([128, 128, 128], dtype=np.uint8)


def segmented_cloud(result):
    """Filtered cloud coloured by region membership (grey for unsegmented points)."""
    colors = np.tile(UNSEGMENTED_COLOR, (len(result.filtered), 1))
    labels = region_labels(result.regions, len(result.planes))
    for plane, label in zip(result.planes, labels):
        if label >= 0 and plane.point_indices is not None:
            colors[plane.point_indices] = region_color(label)
    return PointCloud(result.filtered.points, colors)


def region_plane_overlay(region_planes, samples=40):
    """Region rectangles sampled as a point grid, one colour per region."""
    pts, cols = [], []
    s = np.linspace(-1.0, 1.0, samples)
    for rp in region_planes:
        a, b = rp.axes
        ha, hb = rp.half_extents
        ga, gb = np.meshgrid(s * ha, s * hb, indexing="ij")
        grid = rp.center + ga.reshape(-1, 1) * a + gb.reshape(-1, 1) * b
        pts.append(grid)
        cols.append(np.tile(region_color(rp.region_id), (len(grid), 1)))
    if not pts:
        return None
    return PointCloud(np.vstack(pts), np.vstack(cols))


def text_summary(report):
    lines = [f"regions: {report['counts']['regions']}  voxel planes: {report['counts']['voxel_planes']}"
             f"  filtered out: {report['filter']['removed']}"]
    for r in report["regions"]:
        o = r["orientation"]
        fmt = lambda v: "  n/a" if v is None else f"{v:5.1f}"
        lines.append(f"  region {r['region_id']:3d}: strike {fmt(o['strike'])}  dip {fmt(o['dip'])}"
                     f"  dipdir {fmt(o['dipdir'])}  ({r['voxel_planes']} voxel planes)")
    if "quality" in report:
        lines.append(f"z_run = {report['quality']['z_run']:.4f}")
    t = report["timings"]
    lines.append(f"time: total {t['total']:.3f}s, region growing {t['region_growing']:.3f}s")
    return "\n".join(lines)


def run_pipeline(config, cloud=None, truth=None, write_outputs=True):
    """Read inputs, extract orientations, score, and write report plus PLY exports."""
    config.validate()
    if cloud is None:
        if not config.input:
            raise InvalidArgumentError("no input point cloud given")
        cloud = _stage("read", read_ply, config.input)
    if truth is None and config.truth:
        truth = _stage("read", read_ground_truth, config.truth)
    result = extract_orientations(cloud, config)
    report = build_report(config, result, truth)
    if write_outputs and config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        dump_report(report, os.path.join(config.out_dir, "report.json"))
        with open(os.path.join(config.out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
            fh.write(text_summary(report) + "\n")
        if len(result.filtered):
            write_ply(segmented_cloud(result), os.path.join(config.out_dir, "segmented.ply"),
                      binary=config.binary_ply)
        overlay = region_plane_overlay(result.region_planes)
        if overlay is not None:
            write_ply(overlay, os.path.join(config.out_dir, "region_planes.ply"),
                      binary=config.binary_ply)
    return report


_FACTOR_FIELDS = {"zeta": "zeta", "theta": "theta_deg", "psi": "psi", "k": "k"}


def sweep_values(start, end, step):
    """Inclusive arithmetic range with ``floor((end - start) / step) + 1`` entries."""
    if not step > 0:
        raise InvalidArgumentError(f"sweep step must be positive, got {step}")
    if end < start:
        raise InvalidArgumentError("sweep end precedes start")
    count = int(math.floor((end - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


@contextlib.contextmanager
def _gc_paused():
    """Collect once, then keep the cyclic garbage collector off, as timeit does."""
    gc.collect()
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


def run_sweep(base, factor, start, end, step, cloud=None, truth=None, csv_path=None, repeats=1):
    """Vary one factor over a range, holding the others at ``base``; one row per value.

    With ``repeats > 1`` the whole range is swept several times in
    round-robin order and the fastest run per value is kept, so slow drift in
    machine load spreads evenly over the range. Failed runs are recorded and
    the sweep continues.
    """
    if factor not in _FACTOR_FIELDS:
        raise InvalidArgumentError(f"unknown sweep factor {factor!r}; expected one of {SWEEP_FACTORS}")
    values = sweep_values(start, end, step)
    if cloud is None:
        cloud = _stage("read", read_ply, base.input)
    if truth is None and base.truth:
        truth = _stage("read", read_ground_truth, base.truth)
    values = [int(round(v)) if factor == "k" else v for v in values]
    best, errors = {}, {}
    for _ in range(max(1, int(repeats))):
        with _gc_paused():
            for v in values:
                if v in errors:
                    continue
                try:
                    cfg = replace(base, **{_FACTOR_FIELDS[factor]: v}).validate()
                    result = extract_orientations(cloud, cfg)
                except StrikeDipError as exc:
                    log.warning("sweep %s=%s failed: %s", factor, v, exc)
                    errors[v] = exc
                    continue
                if v not in best or result.timings["total"] < best[v].timings["total"]:
                    best[v] = result
    rows = []
    for v in values:
        row = {"schema_version": SCHEMA_VERSION, "factor": factor, "value": v}
        if v in errors:
            row.update(region_growing_seconds=None, total_seconds=None, z_run=None,
                       region_count=None, status="failed", error=str(errors[v]))
        else:
            r = best[v]
            z = score_orientations(r.orientations, truth).z_run if truth else None
            row.update(region_growing_seconds=r.timings["region_growing"],
                       total_seconds=r.timings["total"], z_run=z,
                       region_count=len(r.regions), status="ok", error="")
        rows.append(row)
    if csv_path:
        write_sweep_csv(rows, csv_path)
    return rows


def write_sweep_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in SWEEP_COLUMNS})
