"""Command line entry point.

    mcube bench precision --dim 6 --size 12 --spacing 1.0 0.5 --kind polynomial --order 5
    mcube bench speed --dim 6 --size 8 --order 4 --compare-iterative
    mcube bench verify
    mcube grid save PATH [grid options]
    mcube grid load PATH

Exit codes: 0 success, 1 failed audit, 2 domain/config error, 3 memory guard.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bench import BenchConfig, check_memory, emit, get_function, run_precision, run_speed, run_verify
from .errors import DomainError, FormatError, MemoryGuardError, NonFiniteError, ShapeError
from .grid import build_grid, load_grid, save_grid
from .interp1d import KINDS

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_MEMORY = 0, 1, 2, 3


def _grid_options(p: argparse.ArgumentParser, multi_spacing: bool = False) -> None:
    p.add_argument("--dim", type=int, default=6)
    p.add_argument("--size", type=int, default=12, help="knots per dimension")
    if multi_spacing:
        p.add_argument("--spacing", type=float, nargs="+", default=[0.5])
    else:
        p.add_argument("--spacing", type=float, default=0.5)
    p.add_argument("--function", default="r6", help="r6, plane or quadprod")
    p.add_argument("--anchor", type=float, default=None,
                   help="centre of the grid (default: derived from the function domain)")


def _bench_options(p: argparse.ArgumentParser) -> None:
    _grid_options(p, multi_spacing=True)
    p.add_argument("--kind", choices=KINDS, default="polynomial")
    p.add_argument("--order", type=int, default=5)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--allow-extrapolation", action="store_true")
    p.add_argument("--format", choices=("tsv", "pretty"), default="tsv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcube", description=__doc__.split("\n")[0])
    top = parser.add_subparsers(dest="command", required=True)

    bench = top.add_parser("bench", help="precision/speed benchmarks and audits")
    bsub = bench.add_subparsers(dest="action", required=True)
    _bench_options(bsub.add_parser("precision", help="max/mean error per spacing"))
    speed = bsub.add_parser("speed", help="queries per second")
    _bench_options(speed)
    speed.add_argument("--compare-iterative", action="store_true",
                       help="also time the stage-by-stage baseline")
    verify = bsub.add_parser("verify", help="equivalence and counter audits")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--instances", type=int, default=60)

    grid = top.add_parser("grid", help="grid files")
    gsub = grid.add_subparsers(dest="action", required=True)
    save = gsub.add_parser("save", help="build a grid from a benchmark function and save it")
    save.add_argument("path")
    _grid_options(save)
    load = gsub.add_parser("load", help="load a grid file and print a summary")
    load.add_argument("path")
    return parser


def _config(args, spacing: float) -> BenchConfig:
    return BenchConfig(dim=args.dim, size=args.size, spacing=spacing, kind=args.kind,
                       order=args.order, samples=args.samples, seed=args.seed,
                       extrapolate=args.allow_extrapolation, function=args.function,
                       anchor=args.anchor)


def _bench(args) -> int:
    if args.action == "verify":
        ok = True
        for name, passed, detail in run_verify(args.seed, args.instances):
            print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
            ok &= passed
        return EXIT_OK if ok else EXIT_FAIL
    cfg = _config(args, args.spacing[0])
    if args.action == "precision":
        rows = run_precision(cfg, args.spacing)
    else:
        rows = [run_speed(_config(args, h), args.compare_iterative) for h in args.spacing]
    sys.stdout.write(emit(rows, args.format))
    for row in rows:
        if row.iterative_queries_per_sec is not None:
            print(f"# spacing {row.spacing:g}: iterative {row.iterative_queries_per_sec:.1f} q/s, "
                  f"{row.iterative_prepare_count_per_query:g} prepares/query, "
                  f"speedup {row.speedup:.2f}x", file=sys.stderr)
    return EXIT_OK


def _grid(args) -> int:
    if args.action == "save":
        cfg = BenchConfig(dim=args.dim, size=args.size, spacing=args.spacing,
                          function=args.function, anchor=args.anchor)
        check_memory([cfg.size] * cfg.dim)
        fn = get_function(cfg.function, cfg.dim)
        grid = build_grid(cfg.mesh(fn), fn.eval, vectorized=True)
        save_grid(grid, args.path)
        print(f"saved {args.path}: sizes {grid.mesh.sizes}")
        return EXIT_OK
    grid = load_grid(args.path)
    data = grid.data.data
    print(f"dimensions: {grid.ndim}")
    print(f"sizes: {' '.join(map(str, grid.data.spec.sizes))}")
    print(f"offsets: {' '.join(map(str, grid.data.spec.offsets))}")
    for d, ax in enumerate(grid.mesh.axes, 1):
        print(f"axis {d}: [{ax[0]:g}, {ax[-1]:g}] ({len(ax)} knots)")
    print(f"values: min {np.min(data):.6e} max {np.max(data):.6e}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _bench(args) if args.command == "bench" else _grid(args)
    except MemoryGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MEMORY
    except (DomainError, ShapeError, FormatError, NonFiniteError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
