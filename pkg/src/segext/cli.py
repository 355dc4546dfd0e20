"""Command-line front end.

Subcommands: build, extend, dualize, boxcount, dim, slice. Data goes to
files, summaries to stdout. Exit codes: 0 success, 2 usage, 3 parse error,
4 domain error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import constructions
from .exchange import ParseError, parse_numbered, read_segments, write_records
from .geometry import (
    DomainError,
    GeometryError,
    LineFamily,
    NotRepresentable,
    ParamLine,
    Segment,
    SegmentFamily,
    Window,
    clip,
    dualize_segment,
    extend,
)
from .rasterdim import BoxCountCurve, box_count, estimate_dimension, profile_to_csv, slice_profile

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_DOMAIN = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _window(lo, hi) -> Window:
    if len(lo) != len(hi):
        raise CliError(EXIT_USAGE, "--lo and --hi need the same number of coordinates")
    try:
        return Window(tuple(lo), tuple(hi))
    except GeometryError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None


def _read_numbered(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_numbered(fh)
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read {path}: {exc.strerror}") from None


def _summary(family: SegmentFamily) -> None:
    print(f"segments: {len(family)}")
    box = family.bounding_box()
    if box is None:
        print("bbox: empty")
    else:
        lo, hi = box
        print("bbox: lo=" + ",".join(f"{v:.17g}" for v in lo) + " hi=" + ",".join(f"{v:.17g}" for v in hi))


def cmd_build(args) -> int:
    name = args.construction
    try:
        if name == "example1":
            fam = constructions.example1_segments(args.levels)
        elif name == "example1-extended":
            fam = constructions.example1_extended(args.levels)
        elif name == "example2":
            fam = constructions.example2_tree(args.depth)
        elif name == "cantor-dual":
            fam, fam_b = constructions.cantor_dual_family(
                args.depth, _window(args.lo_a, args.hi_a), _window(args.lo_b, args.hi_b)
            )
            write_records(args.out_b, fam_b)
        else:
            fam = constructions.direction_complete_family(args.count, args.seg_len, args.seed)
    except GeometryError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    write_records(args.out, fam)
    _summary(fam)
    return EXIT_OK


def cmd_extend(args) -> int:
    window = _window(args.lo, args.hi)
    out, dropped = [], 0
    for lineno, rec in _read_numbered(args.input):
        if rec.dim != window.dim:
            raise CliError(EXIT_PARSE, f"line {lineno}: dimension {rec.dim} does not match the window")
        line = extend(rec) if isinstance(rec, Segment) else rec
        if isinstance(line, ParamLine):
            line = line.to_line()
        seg = clip(line, window)
        if seg is None:
            dropped += 1
        else:
            out.append(seg)
    write_records(args.out, out)
    print(f"kept: {len(out)}")
    print(f"dropped: {dropped}")
    return EXIT_OK


def cmd_dualize(args) -> int:
    out = []
    for i, (lineno, rec) in enumerate(_read_numbered(args.input)):
        if not isinstance(rec, Segment):
            raise CliError(EXIT_PARSE, f"line {lineno}: expected a segment (S) record")
        try:
            out.append(dualize_segment(rec))
        except DomainError as exc:
            raise CliError(EXIT_DOMAIN, f"segment {i} (line {lineno}): {exc}") from None
    write_records(args.out, out)
    print(f"segments: {len(out)}")
    return EXIT_OK


def _load_segments(path) -> SegmentFamily:
    try:
        return read_segments(path)
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read {path}: {exc.strerror}") from None


def cmd_boxcount(args) -> int:
    window = _window(args.lo, args.hi)
    family = _load_segments(args.input)
    if len(family) and family.dim != window.dim:
        raise CliError(EXIT_USAGE, "window dimension does not match the input")
    if len(family) == 0:
        family = SegmentFamily(window.dim, ())
    try:
        curve = box_count(family, window, args.k_min, args.k_max, threads=args.threads)
    except GeometryError as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from None
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    curve.to_csv(args.out)
    print(f"levels: {args.k_min}..{args.k_max}")
    print(f"finest count: {curve.entries[-1][2]}")
    return EXIT_OK


def cmd_dim(args) -> int:
    try:
        curve = BoxCountCurve.from_csv(args.input)
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read {args.input}: {exc.strerror}") from None
    except (ValueError, KeyError) as exc:
        raise CliError(EXIT_PARSE, f"bad curve CSV: {exc}") from None
    try:
        est = estimate_dimension(curve, args.k_lo, args.k_hi)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    sys.stdout.write(est.to_csv())
    return EXIT_OK


def cmd_slice(args) -> int:
    window = _window(args.lo, args.hi)
    lines = []
    for lineno, rec in _read_numbered(args.input):
        if isinstance(rec, Segment):
            rec = extend(rec)
        elif isinstance(rec, ParamLine):
            rec = rec.to_line()
        if rec.dim != window.dim:
            raise CliError(EXIT_PARSE, f"line {lineno}: dimension {rec.dim} does not match the window")
        if not rec.is_param_representable:
            raise CliError(EXIT_DOMAIN, f"line {lineno}: line is orthogonal to the x1 axis")
        lines.append(rec)
    if args.t is not None:
        ts = list(args.t)
    else:
        lo, hi = float(window.lo[0]), float(window.hi[0])
        ts = [lo + (i + 0.5) / args.count * (hi - lo) for i in range(args.count)]
    try:
        profile = slice_profile(
            LineFamily(window.dim, lines), window, ts, args.k_min, args.k_max, args.k_lo, args.k_hi
        )
    except NotRepresentable as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from None
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    profile_to_csv(profile, args.out)
    slopes = np.array([est.slope for _, est in profile])
    print(f"samples: {len(profile)}")
    print(f"slope mean: {slopes.mean():.6f} std: {slopes.std():.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker threads, 0 = one per CPU")

    def window_flags(p, required=True):
        p.add_argument("--lo", type=float, nargs="+", required=required, help="window lower corner")
        p.add_argument("--hi", type=float, nargs="+", required=required, help="window upper corner")

    parser = argparse.ArgumentParser(prog="segext", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="generate a segment family")
    kinds = build.add_subparsers(dest="construction", required=True)
    for name in ("example1", "example1-extended"):
        p = kinds.add_parser(name, parents=[common])
        p.add_argument("--levels", type=int, required=True)
        p.add_argument("--out", required=True)
    p = kinds.add_parser("example2", parents=[common])
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out", required=True)
    p = kinds.add_parser("cantor-dual", parents=[common])
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--lo-a", type=float, nargs=2, default=[0.0, 0.0])
    p.add_argument("--hi-a", type=float, nargs=2, default=[1.0, 1.0])
    p.add_argument("--lo-b", type=float, nargs=2, default=[-2.0, -2.0])
    p.add_argument("--hi-b", type=float, nargs=2, default=[2.0, 2.0])
    p.add_argument("--out", required=True, help="segments clipped to window A")
    p.add_argument("--out-b", required=True, help="segments clipped to window B")
    p = kinds.add_parser("direction-complete", parents=[common])
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seg-len", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    build.set_defaults(func=cmd_build)

    p = sub.add_parser("extend", help="extend segments to lines clipped to a window", parents=[common])
    p.add_argument("--in", dest="input", required=True)
    window_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("dualize", help="apply (x, y) -> (1/x, y/x) to every segment", parents=[common])
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dualize)

    p = sub.add_parser("boxcount", help="box counts per dyadic level as CSV", parents=[common])
    p.add_argument("--in", dest="input", required=True)
    window_flags(p)
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_boxcount)

    p = sub.add_parser("dim", help="fit the box-counting slope of a curve CSV", parents=[common])
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--k-lo", type=int)
    p.add_argument("--k-hi", type=int)
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("slice", help="box dimension of vertical slices", parents=[common])
    p.add_argument("--in", dest="input", required=True)
    ts = p.add_mutually_exclusive_group(required=True)
    ts.add_argument("--t", type=float, nargs="+", help="explicit slice positions")
    ts.add_argument("--count", type=int, help="that many midpoint samples over the window's x1 range")
    window_flags(p)
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--k-lo", type=int)
    p.add_argument("--k-hi", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_slice)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 0:
        parser.error("--threads must be >= 0")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"segext: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CliError as exc:
        print(f"segext: {exc}", file=sys.stderr)
        if exc.code == EXIT_USAGE:
            parser.print_usage(sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
