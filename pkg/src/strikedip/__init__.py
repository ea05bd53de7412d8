"""Planar orientation (strike, dip, dip direction) extraction from point clouds."""

__version__ = "0.1.0"

from .cloud_io import GroundTruthSurface, PointCloud, read_ground_truth, read_ply, write_ply
from .errors import (DegenerateGeometryError, EmptyCloudError, InvalidArgumentError, ParseError,
                     SchemaError, StageError, StrikeDipError, ValidationError)
from .estimators import (MahalanobisOutlierFilter, PlanarOrientationExtractor, RegionGrower,
                         VoxelPlaneFitter)
from .orientation import PlanarOrientation, orientation_from_normal
from .pipeline import RunConfig, extract_orientations, run_pipeline, run_sweep
from .synthetic import box_scene, generate_synthetic, observatory_scene, prism_scene

__all__ = [
    "GroundTruthSurface", "PointCloud", "read_ground_truth", "read_ply", "write_ply",
    "DegenerateGeometryError", "EmptyCloudError", "InvalidArgumentError", "ParseError", "SchemaError",
    "StageError", "StrikeDipError", "ValidationError",
    "PlanarOrientation", "orientation_from_normal",
    "MahalanobisOutlierFilter", "PlanarOrientationExtractor", "RegionGrower", "VoxelPlaneFitter",
    "RunConfig", "extract_orientations", "run_pipeline", "run_sweep",
    "box_scene", "generate_synthetic", "observatory_scene", "prism_scene",
]
