"""Benchmark harness: grid sweeps over velocities, headings and speed sets."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from . import costs as costs_mod
from . import solver as solver_mod
from .model import (DiscretizationScheme, Instance, KinematicLimits,
                    config_velocity, make_grid_instance)
from .solver import TourSolution
from .trajectory import format_sample_rows, planar_time_optimal, sample

BASELINE_V = 1.5  # m/s; the Dubins baseline is referenced at this speed


@dataclass(frozen=True)
class ExperimentConfig:
    grids: tuple[tuple[int, int], ...]
    spacing: float
    v_sweep: tuple[float, ...]
    a_max: float
    heading_counts: tuple[int, ...]
    speed_fraction_sets: tuple[tuple[float, ...], ...]
    solver: str = "exact"  # "exact" falls back per-cell on capacity
    output_dir: str | None = None
    cache_dir: str | None = None
    budget: int = solver_mod.DEFAULT_BUDGET
    seed: int = 0
    sample_dt: float = 0.1

    def __post_init__(self):
        if not (self.grids and self.v_sweep and self.heading_counts
                and self.speed_fraction_sets):
            raise ValueError("sweeps must be non-empty")
        if self.spacing <= 0.0:
            raise ValueError("spacing must be positive")
        if self.solver not in ("exact", "heuristic"):
            raise ValueError("solver must be 'exact' or 'heuristic'")


@dataclass
class ResultRow:
    label: str  # instance label, e.g. "3x3"
    method: str  # TBTSP | DDTSP
    v_max: float
    headings: int
    speeds: int
    objective: float
    build_time: float
    solve_time: float
    optimal: bool
    capacity_fallback: bool = False
    solution: TourSolution | None = field(default=None, repr=False)
    instance: Instance | None = field(default=None, repr=False)

    @property
    def slug(self) -> str:
        return (f"{self.label}_{self.method.lower()}_h{self.headings}"
                f"_s{self.speeds}_v{self.v_max:g}")


@dataclass(frozen=True)
class ImprovementStat:
    headings: int
    speeds: int
    v_max: float
    improvement_pct: float  # mean over instances vs best Dubins time at 1.5 m/s
    instances: int


def _solve(tensor, cfg: ExperimentConfig) -> tuple[TourSolution, bool]:
    if cfg.solver == "heuristic":
        return solver_mod.solve_heuristic(tensor, seed=cfg.seed), False
    try:
        return solver_mod.solve_exact(tensor, budget=cfg.budget), False
    except solver_mod.CapacityError:
        return solver_mod.solve_heuristic(tensor, seed=cfg.seed), True


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Build and solve every sweep cell; Dubins cells once per (grid, v, headings).

    Capacity fallbacks are recorded on the row and the sweep continues.
    """
    rows: list[ResultRow] = []
    for (r, c) in cfg.grids:
        label = f"{r}x{c}"
        for h in cfg.heading_counts:
            # the Dubins baseline ignores the speed grid; build it with the
            # first fraction set purely to carry the limits
            for v in cfg.v_sweep:
                limits = KinematicLimits(v, cfg.a_max)
                scheme = DiscretizationScheme.from_counts(
                    h, cfg.speed_fraction_sets[0], limits)
                inst = make_grid_instance(r, c, cfg.spacing, limits, scheme)
                t0 = time.perf_counter()
                tensor = costs_mod.build_ddtsp_costs(inst, cache_dir=cfg.cache_dir)
                t1 = time.perf_counter()
                sol, fellback = _solve(tensor, cfg)
                t2 = time.perf_counter()
                rows.append(ResultRow(label, costs_mod.DDTSP, v, h, 1,
                                      sol.total_time, t1 - t0, t2 - t1,
                                      sol.optimal, fellback, sol, inst))
            for fractions in cfg.speed_fraction_sets:
                for v in cfg.v_sweep:
                    limits = KinematicLimits(v, cfg.a_max)
                    scheme = DiscretizationScheme.from_counts(h, fractions, limits)
                    inst = make_grid_instance(r, c, cfg.spacing, limits, scheme)
                    t0 = time.perf_counter()
                    tensor = costs_mod.build_tbtsp_costs(inst, cache_dir=cfg.cache_dir)
                    t1 = time.perf_counter()
                    sol, fellback = _solve(tensor, cfg)
                    t2 = time.perf_counter()
                    rows.append(ResultRow(label, costs_mod.TBTSP, v, h,
                                          len(fractions), sol.total_time,
                                          t1 - t0, t2 - t1, sol.optimal,
                                          fellback, sol, inst))
    return rows


def improvement_stats(rows) -> list[ImprovementStat]:
    """Mean improvement of each TBTSP cell vs the Dubins objective at 1.5 m/s.

    improvement = 100 * (baseline - tbtsp) / baseline, averaged over instances.
    """
    baselines: dict[tuple[str, int], float] = {}
    for row in rows:
        if row.method == costs_mod.DDTSP and abs(row.v_max - BASELINE_V) <= 1e-9:
            key = (row.label, row.headings)
            best = baselines.get(key)
            if best is None or row.objective < best:
                baselines[key] = row.objective
    cells: dict[tuple[int, int, float], list[float]] = {}
    for row in rows:
        if row.method != costs_mod.TBTSP:
            continue
        base = baselines.get((row.label, row.headings))
        if base is None:
            raise ValueError(
                f"no Dubins baseline at {BASELINE_V} m/s for instance "
                f"{row.label} with {row.headings} headings")
        cells.setdefault((row.headings, row.speeds, row.v_max), []).append(
            100.0 * (base - row.objective) / base)
    return [ImprovementStat(h, s, v, sum(vals) / len(vals), len(vals))
            for (h, s, v), vals in sorted(cells.items())]


def tour_trajectory(instance: Instance, sol: TourSolution, dt: float):
    """Sampled states of the whole closed tour, one row per time step."""
    pts = {w.id: (w.x, w.y) for w in instance.waypoints}
    rows = []
    offset = 0.0
    m = len(sol.order)
    for t in range(m):
        a, b = sol.order[t], sol.order[(t + 1) % m]
        ca, cb = sol.configs[t], sol.configs[(t + 1) % m]
        traj = planar_time_optimal(pts[a], config_velocity(ca, instance.scheme),
                                   pts[b], config_velocity(cb, instance.scheme),
                                   instance.limits)
        for (tt, x, y, vx, vy, ax, ay) in sample(traj, dt):
            if rows and tt == 0.0:
                continue  # junction sample already emitted by the previous edge
            rows.append((offset + tt, x, y, vx, vy, ax, ay))
        offset += traj.duration
    return rows


RESULTS_HEADER = "label,method,v_max,headings,speeds,objective_s,optimal,capacity_fallback"
TIMINGS_HEADER = "label,method,v_max,headings,speeds,build_time_s,solve_time_s"
IMPROVEMENT_HEADER = "headings,speeds,v_max,improvement_pct,instances"


def emit_outputs(rows, stats, output_dir, sample_dt: float = 0.1) -> list[Path]:
    """Write results/improvement/timings CSVs plus per-solution tour and
    trajectory files.  Timings live in their own file so the other outputs are
    byte-identical across runs."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    lines = [RESULTS_HEADER]
    for row in rows:
        lines.append(",".join([
            row.label, row.method, format(row.v_max, "g"), str(row.headings),
            str(row.speeds), format(row.objective, ".9g"),
            "true" if row.optimal else "false",
            "true" if row.capacity_fallback else "false"]))
    written.append(_write(out / "results.csv", "\n".join(lines) + "\n"))

    lines = [TIMINGS_HEADER]
    for row in rows:
        lines.append(",".join([
            row.label, row.method, format(row.v_max, "g"), str(row.headings),
            str(row.speeds), format(row.build_time, ".6g"),
            format(row.solve_time, ".6g")]))
    written.append(_write(out / "timings.csv", "\n".join(lines) + "\n"))

    lines = [IMPROVEMENT_HEADER]
    for st in stats:
        lines.append(",".join([
            str(st.headings), str(st.speeds), format(st.v_max, "g"),
            format(st.improvement_pct, ".6g"), str(st.instances)]))
    written.append(_write(out / "improvement.csv", "\n".join(lines) + "\n"))

    for row in rows:
        if row.solution is None:
            continue
        written.append(_write(out / f"tour_{row.slug}.json",
                              solver_mod.solution_to_json(row.solution) + "\n"))
        if row.method == costs_mod.TBTSP and row.instance is not None:
            samples = tour_trajectory(row.instance, row.solution, sample_dt)
            written.append(_write(out / f"trajectory_{row.slug}.csv",
                                  format_sample_rows(samples)))
    return written


def _write(path: Path, text: str) -> Path:
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"writing {path} failed: {exc}") from exc
    return path
