"""Command line interface: gen, costs, solve, bench, export-lp."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench as bench_mod
from . import costs as costs_mod
from . import milp as milp_mod
from . import solver as solver_mod
from .model import (DiscretizationScheme, KinematicLimits, instance_from_json,
                    instance_to_json, make_grid_instance)

EXIT_OK = 0
EXIT_IO = 1
EXIT_CAPACITY = 2


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        r, c = text.lower().split("x")
        return int(r), int(c)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must look like 3x4, got {text!r}") from exc


def _parse_fractions(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad fraction list {text!r}") from exc


def _load_instance(path: str):
    return instance_from_json(Path(path).read_text(encoding="ascii"))


def _build_tensor(instance, kind: str, cache_dir):
    if kind == "tbtsp":
        return costs_mod.build_tbtsp_costs(instance, cache_dir=cache_dir)
    return costs_mod.build_ddtsp_costs(instance, cache_dir=cache_dir)


def _cmd_gen(args) -> int:
    limits = KinematicLimits(args.vmax[0], args.amax)
    scheme = DiscretizationScheme.from_counts(args.headings, args.speeds[0], limits)
    instance = make_grid_instance(args.grid[0][0], args.grid[0][1], args.spacing,
                                  limits, scheme)
    Path(args.out).write_text(instance_to_json(instance) + "\n", encoding="ascii")
    print(f"wrote {args.out}: {instance.n} waypoints, "
          f"{len(scheme.headings)} headings, {len(scheme.speeds)} speeds")
    return EXIT_OK


def _cmd_costs(args) -> int:
    instance = _load_instance(args.instance)
    tensor = _build_tensor(instance, args.kind, args.cache_dir)
    omega = costs_mod.edge_count(tensor.n, tensor.h, tensor.s).omega
    print(f"{args.kind} tensor: n={tensor.n} h={tensor.h} s={tensor.s} "
          f"edges={omega}")
    if args.cache_dir:
        print(f"cached under {costs_mod.cache_path(args.cache_dir, instance, tensor.kind)}")
    return EXIT_OK


def _cmd_solve(args) -> int:
    instance = _load_instance(args.instance)
    tensor = _build_tensor(instance, args.kind, args.cache_dir)
    if args.solver == "heuristic":
        sol = solver_mod.solve_heuristic(tensor, seed=args.seed)
    else:
        try:
            sol = solver_mod.solve_exact(tensor, budget=args.budget)
        except solver_mod.CapacityError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CAPACITY
    report = solver_mod.validate_solution(tensor, sol)
    if not report.ok:
        print(f"error: solver produced an invalid tour: {report.first_violation}",
              file=sys.stderr)
        return EXIT_IO
    if args.out:
        Path(args.out).write_text(solver_mod.solution_to_json(sol) + "\n",
                                  encoding="ascii")
    if args.samples:
        if args.kind != "tbtsp":
            print("error: --samples requires --kind tbtsp", file=sys.stderr)
            return EXIT_IO
        rows = bench_mod.tour_trajectory(instance, sol, args.dt)
        from .trajectory import write_samples_csv
        write_samples_csv(rows, args.samples)
    print(f"tour {list(sol.order)} total_time={sol.total_time:.6f}s "
          f"optimal={sol.optimal}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    cfg = bench_mod.ExperimentConfig(
        grids=tuple(args.grid),
        spacing=args.spacing,
        v_sweep=tuple(args.vmax),
        a_max=args.amax,
        heading_counts=tuple(args.headings),
        speed_fraction_sets=tuple(args.speeds),
        solver=args.solver,
        output_dir=args.out,
        cache_dir=args.cache_dir,
        budget=args.budget,
        seed=args.seed,
        sample_dt=args.dt,
    )
    rows = bench_mod.run_experiment(cfg)
    stats = bench_mod.improvement_stats(rows) if any(
        r.method == costs_mod.TBTSP for r in rows) else []
    bench_mod.emit_outputs(rows, stats, args.out, sample_dt=cfg.sample_dt)
    fallbacks = [r.slug for r in rows if r.capacity_fallback]
    print(f"wrote {args.out}: {len(rows)} rows, {len(stats)} improvement cells")
    if fallbacks:
        print(f"capacity fallbacks (heuristic values): {', '.join(fallbacks)}")
        return EXIT_CAPACITY
    return EXIT_OK


def _cmd_export_lp(args) -> int:
    instance = _load_instance(args.instance)
    tensor = _build_tensor(instance, args.kind, args.cache_dir)
    model = milp_mod.export_milp(tensor)
    Path(args.out).write_text(model.text, encoding="ascii")
    print(f"wrote {args.out}: {model.num_binaries} binaries, "
          f"{model.num_integers} integers, "
          f"{model.num_assignment_rows + model.num_flow_rows + model.num_subtour_rows} rows")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tbtsp",
        description="Tour planning with trajectory-based travel times and a "
                    "Dubins baseline.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common_tensor_args(p):
        p.add_argument("--instance", required=True, help="instance JSON file")
        p.add_argument("--kind", choices=("tbtsp", "ddtsp"), default="tbtsp")
        p.add_argument("--cache-dir", default=None, help="cost tensor cache directory")

    p = sub.add_parser("gen", help="generate a grid instance JSON")
    p.add_argument("--grid", type=_parse_grid, action="append", required=True,
                   metavar="RxC")
    p.add_argument("--spacing", type=float, default=9.0)
    p.add_argument("--vmax", type=float, action="append", required=True)
    p.add_argument("--amax", type=float, default=0.5)
    p.add_argument("--headings", type=int, default=8)
    p.add_argument("--speeds", type=_parse_fractions, action="append",
                   default=None, metavar="F1,F2,...")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("costs", help="build (and cache) a cost tensor")
    add_common_tensor_args(p)
    p.set_defaults(func=_cmd_costs)

    p = sub.add_parser("solve", help="solve one instance")
    add_common_tensor_args(p)
    p.add_argument("--solver", choices=("exact", "heuristic"), default="exact")
    p.add_argument("--budget", type=int, default=solver_mod.DEFAULT_BUDGET)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="solution JSON path")
    p.add_argument("--samples", default=None, help="sampled trajectory CSV path")
    p.add_argument("--dt", type=float, default=0.1)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bench", help="run a full sweep and write result tables")
    p.add_argument("--grid", type=_parse_grid, action="append", required=True,
                   metavar="RxC")
    p.add_argument("--spacing", type=float, default=9.0)
    p.add_argument("--vmax", type=float, action="append", required=True)
    p.add_argument("--amax", type=float, default=0.5)
    p.add_argument("--headings", type=int, action="append", required=True)
    p.add_argument("--speeds", type=_parse_fractions, action="append",
                   required=True, metavar="F1,F2,...")
    p.add_argument("--solver", choices=("exact", "heuristic"), default="exact")
    p.add_argument("--budget", type=int, default=solver_mod.DEFAULT_BUDGET)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dt", type=float, default=0.1)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--cache-dir", default=None)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("export-lp", help="export the mixed-integer model as .lp text")
    add_common_tensor_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export_lp)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen":
        if args.speeds is None:
            args.speeds = [(0.2, 0.6, 1.0)]
        if len(args.vmax) != 1 or len(args.grid) != 1:
            parser.error("gen takes exactly one --grid and one --vmax")
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except costs_mod.StaleCacheError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
