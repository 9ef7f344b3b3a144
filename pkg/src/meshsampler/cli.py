"""Command line entry points.

Three subcommands: ``sample`` converts one OBJ to a voxelized PLY,
``batch`` converts a directory tree and writes a manifest, ``fixture``
emits a synthetic test scene.  Exit status: 0 all ok, 1 some file
failed, 2 bad usage.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .ao import AoConfig
from .pipeline import (
    FIXTURE_KINDS,
    PipelineConfig,
    generate_fixture,
    process_batch,
    process_file,
)
from .sample import SampleConfig

_FORMATS = {"ascii": "ascii", "binary": "binary_little_endian"}
_CULL = {"full": "full", "duplicates-only": "duplicates_only", "off": "off"}
_DUP_MODES = {"index": "by_index", "position": "by_position"}


def _add_verbose_flag(sub):
    # mirrored on every subparser so the flag works after the
    # subcommand too; SUPPRESS keeps a root-level -v from being
    # clobbered by a subparser default
    sub.add_argument("-v", "--verbose", action="count",
                     default=argparse.SUPPRESS,
                     help="log per-file lines; repeat for stage detail")


def _add_common_flags(sub):
    _add_verbose_flag(sub)
    sub.add_argument("-o", "--output", required=True, help="output path")
    sub.add_argument("--points", type=int, default=100_000,
                     help="samples to draw (default 100000)")
    sub.add_argument("--resolution", type=int, default=256,
                     help="voxel grid side length (default 256)")
    sub.add_argument("--seed", type=int, default=0,
                     help="base seed for all randomness (default 0)")
    sub.add_argument("--ao-directions", type=int, default=256,
                     help="view directions per visibility test (default 256)")
    sub.add_argument("--ao-samples", type=int, default=4,
                     help="surface samples per face (default 4)")
    sub.add_argument("--duplicate-mode", choices=sorted(_DUP_MODES),
                     default="position",
                     help="how faces are matched for duplicate removal")
    sub.add_argument("--cull", choices=["full", "duplicates-only", "off"],
                     default="full", help="face removal policy (default full)")
    sub.add_argument("--format", choices=sorted(_FORMATS), default="binary",
                     help="PLY encoding (default binary)")
    sub.add_argument("--texture-filter", choices=["nearest", "bilinear"],
                     default="bilinear", help="texture sampling filter")
    sub.add_argument("--no-vflip", action="store_true",
                     help="do not flip the texture v axis")
    sub.add_argument("--clamp-wrap", action="store_true",
                     help="clamp UVs to [0,1] instead of repeat wrapping")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meshsampler",
        description="Convert textured OBJ meshes to voxelized colored "
                    "PLY point clouds.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="log per-file lines; repeat for stage detail")
    commands = parser.add_subparsers(dest="command", required=True)

    p_sample = commands.add_parser("sample", help="convert a single OBJ file")
    p_sample.add_argument("input", help="input OBJ file")
    _add_common_flags(p_sample)

    p_batch = commands.add_parser("batch", help="convert a directory of OBJ files")
    p_batch.add_argument("input", help="input directory, searched recursively")
    _add_common_flags(p_batch)
    p_batch.add_argument("--jobs", type=int, default=1,
                         help="concurrent files (default 1)")

    p_fixture = commands.add_parser("fixture", help="write a synthetic test scene")
    _add_verbose_flag(p_fixture)
    p_fixture.add_argument("kind", choices=list(FIXTURE_KINDS))
    p_fixture.add_argument("-o", "--output", required=True,
                           help="output directory")
    return parser


def _config_from_args(args) -> PipelineConfig:
    return PipelineConfig(
        input=args.input,
        output=args.output,
        n_points=args.points,
        resolution=args.resolution,
        ao=AoConfig(
            n_directions=args.ao_directions,
            samples_per_face=args.ao_samples,
            seed=args.seed,
        ),
        sample=SampleConfig(
            n_points=args.points,
            seed=args.seed,
            texture_filter=args.texture_filter,
            vflip=not args.no_vflip,
            wrap="clamp" if args.clamp_wrap else "repeat",
        ),
        duplicate_mode=_DUP_MODES[args.duplicate_mode],
        cull_policy=_CULL[args.cull],
        ply_encoding=_FORMATS[args.format],
        jobs=getattr(args, "jobs", 1),
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s: %(message)s")

    if args.command == "fixture":
        generate_fixture(args.kind, args.output)
        return 0

    try:
        cfg = _config_from_args(args)
    except ValueError as exc:
        parser.error(str(exc))  # exits 2

    if args.command == "sample":
        entries = [process_file(cfg, args.input)]
    else:
        try:
            entries = process_batch(cfg)
        except NotADirectoryError as exc:
            parser.error(str(exc))

    failed = [e for e in entries if e.status != "ok"]
    for e in failed:
        print(f"failed: {e.input}: {e.error}", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
