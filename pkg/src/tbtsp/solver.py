"""Exact and heuristic tour solving over configuration cost tensors.

The exact method is a Held-Karp dynamic program over (visited set, last
waypoint, last configuration) states, rooted at waypoint 1 whose entry
configuration is enumerated in an outer loop so the closing edge matches it.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace

import numpy as np

from .costs import CostTensor
from .model import Configuration

DEFAULT_BUDGET = 2_000_000_000


class CapacityError(RuntimeError):
    """Exact solve would exceed the relaxation budget; use solve_heuristic."""


@dataclass(frozen=True)
class TourSolution:
    order: tuple[int, ...]  # waypoint ids, cyclic, starting at 1
    configs: tuple[Configuration, ...]  # aligned with order
    total_time: float
    optimal: bool
    gap: float | None  # 0 when proven optimal, None when unknown

    def config_for(self, waypoint_id: int) -> Configuration:
        return self.configs[self.order.index(waypoint_id)]


def relaxation_count(n: int, configs_per_waypoint: int) -> int:
    """Nominal DP work: subsets x waypoint pairs x configuration pairs."""
    return (2 ** n) * n * n * configs_per_waypoint ** 2


def _bits(mask: int) -> list[int]:
    out = []
    b = 0
    while mask:
        if mask & 1:
            out.append(b)
        mask >>= 1
        b += 1
    return out


def _held_karp(C: np.ndarray, n: int, k: int, c0: int) -> np.ndarray:
    """DP table dp[mask, j, c]: cheapest path from (wp 0, c0) visiting exactly
    the waypoints in mask (indices shifted by one), ending at j with config c."""
    full = (1 << (n - 1)) - 1
    dp = np.full((full + 1, n - 1, k), np.inf)
    start_rows = C[0, c0, 1:, :]  # (n-1, k)
    for jb in range(n - 1):
        dp[1 << jb, jb] = start_rows[jb]
    sub = C[1:, :, 1:, :]  # transitions among non-root waypoints
    for mask in range(1, full + 1):
        if mask == full:
            break
        for jb in _bits(mask):
            row = dp[mask, jb]
            # extend to every waypoint at once, then scatter to the unvisited
            cand = (row[:, None, None] + sub[jb]).min(axis=0)  # (n-1, k)
            rem = full & ~mask
            for j2 in _bits(rem):
                tgt = dp[mask | (1 << j2), j2]
                np.minimum(tgt, cand[j2], out=tgt)
    return dp


def _closing_totals(dp: np.ndarray, C: np.ndarray, c0: int) -> np.ndarray:
    return dp[-1] + C[1:, :, 0, c0]


def _backtrack(dp: np.ndarray, C: np.ndarray, k: int, c0: int) -> list[tuple[int, int]]:
    totals = _closing_totals(dp, C, c0)
    jb, c = divmod(int(np.argmin(totals)), k)
    full = dp.shape[0] - 1
    mask = full
    path = [(jb, c)]
    while mask != (1 << jb):
        prev_mask = mask & ~(1 << jb)
        cands = dp[prev_mask] + C[1:, :, jb + 1, c]
        target = dp[mask, jb, c]
        jb, c = divmod(int(np.argmin(np.abs(cands - target))), k)
        path.append((jb, c))
        mask = prev_mask
    path.reverse()
    return path


def solve_exact(tensor: CostTensor, budget: int = DEFAULT_BUDGET) -> TourSolution:
    """Provably optimal closed tour; raises CapacityError beyond the budget."""
    n, k = tensor.n, tensor.config_count
    if n < 2:
        raise ValueError("need at least 2 waypoints")
    work = relaxation_count(n, k)
    if work > budget:
        raise CapacityError(
            f"exact solve needs ~{work:.2e} relaxations (budget {budget:.2e}); "
            "use solve_heuristic or raise the budget")
    C = tensor.flat()
    best_total, best_c0 = np.inf, -1
    for c0 in range(k):
        dp = _held_karp(C, n, k, c0)
        total = float(_closing_totals(dp, C, c0).min())
        if total < best_total:
            best_total, best_c0 = total, c0
    dp = _held_karp(C, n, k, best_c0)
    path = _backtrack(dp, C, k, best_c0)
    order = (1,) + tuple(jb + 2 for jb, _ in path)
    flat_cfgs = (best_c0,) + tuple(c for _, c in path)
    configs = tuple(Configuration(wp, *tensor.config_of(c))
                    for wp, c in zip(order, flat_cfgs))
    return TourSolution(order, configs, best_total, optimal=True, gap=0.0)


def reoptimize_configs(tensor: CostTensor, order) -> TourSolution:
    """Optimal configuration per waypoint for a fixed cyclic visiting order."""
    order = tuple(int(w) for w in order)
    n, k = tensor.n, tensor.config_count
    if sorted(order) != list(range(1, n + 1)):
        raise ValueError("order must be a permutation of the waypoint ids")
    C = tensor.flat()
    idx = [w - 1 for w in order]
    m = len(idx)

    def forward(c0: int) -> tuple[float, list[np.ndarray]]:
        vecs = [C[idx[0], c0, idx[1]]]
        for t in range(1, m - 1):
            vecs.append((vecs[-1][:, None] + C[idx[t], :, idx[t + 1]]).min(axis=0))
        total = float((vecs[-1] + C[idx[-1], :, idx[0], c0]).min())
        return total, vecs

    best_total, best_c0 = np.inf, 0
    for c0 in range(k):
        total, _ = forward(c0)
        if total < best_total:
            best_total, best_c0 = total, c0

    _, vecs = forward(best_c0)
    closing = vecs[-1] + C[idx[-1], :, idx[0], best_c0]
    c_cur = int(np.argmin(closing))
    rev = [c_cur]
    for t in range(m - 2, 0, -1):
        cands = vecs[t - 1] + C[idx[t], :, idx[t + 1], c_cur]
        c_cur = int(np.argmin(np.abs(cands - vecs[t][c_cur])))
        rev.append(c_cur)
    flat_cfgs = [best_c0] + rev[::-1]
    configs = tuple(Configuration(wp, *tensor.config_of(c))
                    for wp, c in zip(order, flat_cfgs))
    return TourSolution(order, configs, best_total, optimal=False, gap=None)


def _nearest_neighbor(tensor: CostTensor, start_cfg: int) -> tuple[int, ...]:
    C = tensor.flat()
    n = tensor.n
    order = [0]
    cur_j, cur_c = 0, start_cfg
    while len(order) < n:
        row = C[cur_j, cur_c].copy()  # (n, k)
        row[order, :] = np.inf
        cur_j, cur_c = divmod(int(np.argmin(row)), tensor.config_count)
        order.append(cur_j)
    return tuple(j + 1 for j in order)


def _two_opt(tensor: CostTensor, order: tuple[int, ...],
             max_rounds: int = 60) -> TourSolution:
    cur = reoptimize_configs(tensor, order)
    for _ in range(max_rounds):
        improved = False
        m = len(order)
        for i in range(1, m - 1):
            for j in range(i + 1, m):
                cand_order = order[:i] + order[i:j + 1][::-1] + order[j + 1:]
                cand = reoptimize_configs(tensor, cand_order)
                if cand.total_time < cur.total_time - 1e-9:
                    cur, order = cand, cand_order
                    improved = True
                    break
            if improved:
                break
        if not improved:
            return cur
    return cur


def solve_heuristic(tensor: CostTensor, seed: int = 0) -> TourSolution:
    """Nearest-neighbor start plus 2-opt with per-order config re-optimization."""
    n, k = tensor.n, tensor.config_count
    if n < 2:
        raise ValueError("need at least 2 waypoints")
    rng = random.Random(seed)
    restarts = 4 if k <= 64 else 2
    starts = []
    for _ in range(restarts):
        c = rng.randrange(k)
        if c not in starts:
            starts.append(c)
    best = None
    for c0 in starts:
        sol = _two_opt(tensor, _nearest_neighbor(tensor, c0))
        if best is None or sol.total_time < best.total_time - 1e-12:
            best = sol
    return replace(best, optimal=False, gap=None)


# --- validation --------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]
    total_time: float | None

    @property
    def first_violation(self) -> str | None:
        return self.violations[0] if self.violations else None


def tour_edges(tensor: CostTensor, sol: TourSolution):
    """Directed (i, c_i, j, c_j) edges of the closed tour, 0-based/flat indices."""
    edges = []
    m = len(sol.order)
    for t in range(m):
        i, j = sol.order[t], sol.order[(t + 1) % m]
        ci = tensor.flat_index(sol.configs[t].heading_idx, sol.configs[t].speed_idx)
        nxt = sol.configs[(t + 1) % m]
        cj = tensor.flat_index(nxt.heading_idx, nxt.speed_idx)
        edges.append((i - 1, ci, j - 1, cj))
    return edges


def validate_edge_list(tensor: CostTensor, edges,
                       expected_total: float | None = None) -> ValidationReport:
    """Check degree, flow conservation, subtour-freeness and cost consistency."""
    n = tensor.n
    violations = []
    out_deg = {i: 0 for i in range(n)}
    in_deg = {i: 0 for i in range(n)}
    leave_cfg: dict[int, int] = {}
    enter_cfg: dict[int, int] = {}
    for (i, ci, j, cj) in edges:
        out_deg[i] += 1
        in_deg[j] += 1
        leave_cfg[i] = ci
        enter_cfg[j] = cj
    bad_out = [i for i, d in out_deg.items() if d != 1]
    bad_in = [i for i, d in in_deg.items() if d != 1]
    if bad_out or bad_in:
        violations.append(
            f"degree: waypoints not entered/left exactly once "
            f"(out {sorted(bad_out)}, in {sorted(bad_in)})")
    else:
        mismatched = [i for i in range(n) if enter_cfg[i] != leave_cfg[i]]
        if mismatched:
            violations.append(
                f"flow: entry configuration differs from exit at waypoints "
                f"{[i + 1 for i in mismatched]}")
        succ = {i: j for (i, _, j, _) in edges}
        seen, cur = {0}, succ.get(0, 0)
        while cur not in seen:
            seen.add(cur)
            cur = succ[cur]
        if len(seen) != n:
            violations.append(f"subtour: cycle through waypoint 1 covers only "
                              f"{len(seen)} of {n} waypoints")

    C = tensor.flat()
    total = 0.0
    for (i, ci, j, cj) in edges:
        c = C[i, ci, j, cj]
        if not np.isfinite(c):
            violations.append(f"cost: unusable edge {(i + 1, j + 1)}")
            total = float("nan")
            break
        total += float(c)
    if expected_total is not None and np.isfinite(total):
        if abs(total - expected_total) > 1e-9 * max(1.0, abs(expected_total)):
            violations.append(
                f"objective: stated {expected_total!r} but edges sum to {total!r}")
    return ValidationReport(not violations, tuple(violations),
                            total if np.isfinite(total) else None)


def validate_solution(tensor: CostTensor, sol: TourSolution) -> ValidationReport:
    n = tensor.n
    if sorted(sol.order) != list(range(1, n + 1)):
        return ValidationReport(False, (
            "degree: order is not a permutation of the waypoint ids",), None)
    if sol.order[0] != 1:
        return ValidationReport(False, ("order: tour must start at waypoint 1",), None)
    if len(sol.configs) != len(sol.order):
        return ValidationReport(False, ("configs: one configuration per waypoint required",), None)
    for wp, cfg in zip(sol.order, sol.configs):
        if cfg.waypoint != wp:
            return ValidationReport(False, (
                f"configs: configuration waypoint {cfg.waypoint} out of order (expected {wp})",), None)
        if not (0 <= cfg.heading_idx < tensor.h and 0 <= cfg.speed_idx < tensor.s):
            return ValidationReport(False, (f"configs: indices out of range for {cfg}",), None)
    return validate_edge_list(tensor, tour_edges(tensor, sol), sol.total_time)


# --- JSON --------------------------------------------------------------------


def solution_to_json(sol: TourSolution, indent: int | None = 2) -> str:
    doc = {
        "order": list(sol.order),
        "configs": [{"wp": c.waypoint, "heading_idx": c.heading_idx,
                     "speed_idx": c.speed_idx} for c in sol.configs],
        "total_time": sol.total_time,
        "optimal": sol.optimal,
        "gap": sol.gap,
    }
    return json.dumps(doc, indent=indent, sort_keys=True)


def solution_from_json(text: str) -> TourSolution:
    doc = json.loads(text)
    configs = tuple(Configuration(c["wp"], c["heading_idx"], c["speed_idx"])
                    for c in doc["configs"])
    return TourSolution(tuple(doc["order"]), configs, float(doc["total_time"]),
                        bool(doc["optimal"]), doc.get("gap"))
