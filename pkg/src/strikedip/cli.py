"""Command line interface: run, sweep, synth and score subcommands."""

import argparse
import json
import logging
import os
import sys

from . import __version__
from .cloud_io import read_ground_truth, write_ground_truth, write_ply
from .errors import (DegenerateGeometryError, InvalidArgumentError, ParseError, SchemaError,
                     StageError, StrikeDipError, ValidationError)
from .pipeline import (SWEEP_FACTORS, RunConfig, load_report, orientations_from_report,
                       run_pipeline, run_sweep, text_summary)
from .quality import score_orientations
from .synthetic import box_scene, generate_synthetic, observatory_scene, prism_scene

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DEGENERATE = 4

log = logging.getLogger("strikedip")


def exit_code_for(exc):
    """Map an exception to the documented process exit code."""
    if isinstance(exc, StageError):
        return exit_code_for(exc.cause)
    if isinstance(exc, (OSError, ParseError, SchemaError, ValidationError)):
        return EXIT_IO
    if isinstance(exc, DegenerateGeometryError):
        return EXIT_DEGENERATE
    return EXIT_CONFIG


def _add_pipeline_args(p, need_input=True):
    p.add_argument("--input", required=need_input, help="point cloud (.ply, ascii or binary)")
    p.add_argument("--truth", help="ground-truth CSV (id,strike,dip,dipdir,nx,ny,nz)")
    p.add_argument("--zeta", type=float, default=RunConfig.zeta,
                   help="voxel edge as a fraction of the longest bounding-box side")
    p.add_argument("--theta", type=float, default=RunConfig.theta_deg,
                   help="region-growing normal angle threshold, degrees")
    p.add_argument("--psi", type=float, default=RunConfig.psi,
                   help="seed promotion distance threshold")
    p.add_argument("--k", type=int, default=RunConfig.k, help="nearest neighbours per voxel plane")
    p.add_argument("--sigma", type=float, default=RunConfig.sigma,
                   help="Mahalanobis outlier threshold")
    p.add_argument("--min-points", type=int, default=RunConfig.min_points,
                   help="minimum points for a voxel plane fit")
    p.add_argument("--min-region-size", type=int, default=RunConfig.min_region_size,
                   help="minimum voxel planes per reported region")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="strikedip_out")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--psi-relative", action="store_true",
                   help="read --psi as a multiple of the voxel edge length")
    p.add_argument("--binary-ply", action="store_true", help="write binary instead of ascii PLY")


def _config_from_args(args):
    return RunConfig(
        input=args.input, truth=args.truth, zeta=args.zeta, theta_deg=args.theta, psi=args.psi,
        k=args.k, sigma=args.sigma, min_points=args.min_points,
        min_region_size=args.min_region_size, psi_relative=args.psi_relative,
        rng_seed=args.seed, out_dir=args.out_dir, threads=args.threads,
        binary_ply=args.binary_ply,
    ).validate()


def build_parser():
    parser = argparse.ArgumentParser(
        prog="strikedip",
        description="Extract strike, dip and dip direction of planar surfaces from point clouds.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="process one point cloud")
    _add_pipeline_args(run)
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="vary one factor over a range and record z and timings")
    _add_pipeline_args(sweep)
    sweep.add_argument("--factor", choices=SWEEP_FACTORS, required=True)
    sweep.add_argument("--start", type=float, required=True)
    sweep.add_argument("--end", type=float, required=True)
    sweep.add_argument("--step", type=float, required=True)
    sweep.add_argument("--repeats", type=int, default=1,
                       help="sweep the range this many times and keep the fastest run per value")
    sweep.add_argument("--csv", help="output CSV (default: OUT_DIR/sweep_FACTOR.csv)")
    sweep.set_defaults(func=cmd_sweep)

    synth = sub.add_parser("synth", help="write a seeded synthetic scene and its ground truth")
    synth.add_argument("--scene", choices=("observatory", "box", "prism"), default="observatory")
    synth.add_argument("--points-per-face", type=int, default=10_000)
    synth.add_argument("--noise", type=float, default=None,
                       help="noise sigma as a fraction of scene extent")
    synth.add_argument("--outliers", type=float, default=None,
                       help="planted outliers as a fraction of surface points")
    synth.add_argument("--open-top", action="store_true", help="box scene without its top face")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out-dir", default="strikedip_synth")
    synth.add_argument("--binary-ply", action="store_true")
    synth.set_defaults(func=cmd_synth)

    score = sub.add_parser("score", help="score a saved run report against ground truth")
    score.add_argument("--report", required=True, help="report.json written by `run`")
    score.add_argument("--truth", required=True)
    score.set_defaults(func=cmd_score)
    return parser


def cmd_run(args):
    config = _config_from_args(args)
    report = run_pipeline(config)
    print(text_summary(report))
    print(f"outputs written to {config.out_dir}")
    return EXIT_OK


def cmd_sweep(args):
    config = _config_from_args(args)
    if args.repeats < 1:
        raise InvalidArgumentError("--repeats must be at least 1")
    csv_path = args.csv or os.path.join(config.out_dir, f"sweep_{args.factor}.csv")
    if os.path.dirname(csv_path):
        os.makedirs(os.path.dirname(csv_path), exist_ok=True)
    rows = run_sweep(config, args.factor, args.start, args.end, args.step,
                     csv_path=csv_path, repeats=args.repeats)
    for row in rows:
        if row["status"] == "ok":
            z = "" if row["z_run"] is None else f"  z_run {row['z_run']:.4f}"
            print(f"{args.factor}={row['value']}: {row['region_count']} regions,"
                  f" {row['total_seconds']:.3f}s{z}")
        else:
            print(f"{args.factor}={row['value']}: failed ({row['error']})")
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_synth(args):
    kwargs = {"points_per_face": args.points_per_face, "seed": args.seed}
    if args.noise is not None:
        kwargs["noise_fraction"] = args.noise
    if args.outliers is not None:
        kwargs["outlier_fraction"] = args.outliers
    if args.scene == "observatory":
        scene = observatory_scene(**kwargs)
    elif args.scene == "box":
        scene = box_scene(open_top=args.open_top, **kwargs)
    else:
        scene = prism_scene(**kwargs)
    sample = generate_synthetic(scene)
    os.makedirs(args.out_dir, exist_ok=True)
    cloud_path = os.path.join(args.out_dir, "cloud.ply")
    truth_path = os.path.join(args.out_dir, "truth.csv")
    write_ply(sample.cloud, cloud_path, binary=args.binary_ply)
    write_ground_truth(sample.truth, truth_path)
    print(f"{len(sample.cloud)} points, {len(sample.truth)} surfaces -> {cloud_path}, {truth_path}")
    return EXIT_OK


def cmd_score(args):
    report = load_report(args.report)
    truth = read_ground_truth(args.truth)
    quality = score_orientations(orientations_from_report(report), truth)
    print(json.dumps(quality.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (StrikeDipError, OSError) as exc:
        code = exit_code_for(exc)
        print(f"strikedip {args.command}: error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
