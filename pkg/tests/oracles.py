"""Independent reference computations the unit and acceptance tests check against.

These deliberately avoid the library's analytic solution paths: the axis
oracle sweeps and refines coast velocities numerically, the Dubins oracle
rolls the reported word segment by segment, and the tour oracles enumerate.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

TWO_PI = 2.0 * math.pi


def axis_oracle_duration(p_s, v_s, p_e, v_e, v_axis, a_axis,
                         grid_points: int = 801) -> float:
    """Minimal 3-phase bang-coast-bang duration by coast-velocity search.

    Sweeps the coast velocity over each admissible interval, adds the
    zero-coast kink candidates located by bisection, and polishes the best
    grid cell with golden-section search.  Purely numeric; no case algebra.
    """
    d = p_e - p_s
    best = math.inf
    for s0 in (1.0, -1.0):
        a0 = s0 * a_axis
        lo = max(v_s, v_e) if s0 > 0 else -v_axis
        hi = v_axis if s0 > 0 else min(v_s, v_e)
        if lo > hi:
            continue

        def total(v1: float) -> float:
            t1 = (v1 - v_s) / a0
            t3 = (v_e - v1) / (-a0)
            if t1 < -1e-12 or t3 < -1e-12:
                return math.inf
            d1 = v_s * t1 + 0.5 * a0 * t1 * t1
            d3 = v1 * t3 - 0.5 * a0 * t3 * t3
            rem = d - d1 - d3
            if abs(v1) <= 1e-12:
                return t1 + t3 if abs(rem) <= 1e-9 else math.inf
            t2 = rem / v1
            if t2 < -1e-12:
                return math.inf
            return t1 + max(t2, 0.0) + t3

        def leftover(v1: float) -> float:
            t1 = (v1 - v_s) / a0
            t3 = (v_e - v1) / (-a0)
            d1 = v_s * t1 + 0.5 * a0 * t1 * t1
            d3 = v1 * t3 - 0.5 * a0 * t3 * t3
            return d - d1 - d3

        vg = np.linspace(lo, hi, grid_points)
        t1 = (vg - v_s) / a0
        t3 = (v_e - vg) / (-a0)
        d1 = v_s * t1 + 0.5 * a0 * t1 * t1
        d3 = vg * t3 - 0.5 * a0 * t3 * t3
        rem = d - d1 - d3
        near0 = np.abs(vg) <= 1e-12
        with np.errstate(divide="ignore", invalid="ignore"):
            t2 = np.where(near0, 0.0, rem / np.where(near0, 1.0, vg))
        feasible = ((t1 >= -1e-12) & (t3 >= -1e-12)
                    & np.where(near0, np.abs(rem) <= 1e-9, t2 >= -1e-12))
        totals = np.where(feasible, t1 + np.maximum(t2, 0.0) + t3, np.inf)
        idx = int(np.argmin(totals))
        best = min(best, float(totals[idx]))

        # zero-coast candidates: roots of the leftover distance
        sign_flip = np.nonzero(np.sign(rem[:-1]) * np.sign(rem[1:]) < 0)[0]
        for i in sign_flip:
            a_lo, a_hi = float(vg[i]), float(vg[i + 1])
            f_lo = leftover(a_lo)
            for _ in range(80):
                mid = 0.5 * (a_lo + a_hi)
                fm = leftover(mid)
                if fm == 0.0 or (fm > 0) == (f_lo > 0):
                    a_lo, f_lo = mid, fm
                else:
                    a_hi = mid
            best = min(best, total(0.5 * (a_lo + a_hi)))

        # golden-section polish around the best grid cell
        left = float(vg[max(idx - 1, 0)])
        right = float(vg[min(idx + 1, len(vg) - 1)])
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        x1 = right - phi * (right - left)
        x2 = left + phi * (right - left)
        f1, f2 = total(x1), total(x2)
        for _ in range(90):
            if f1 <= f2:
                right, x2, f2 = x2, x1, f1
                x1 = right - phi * (right - left)
                f1 = total(x1)
            else:
                left, x1, f1 = x1, x2, f2
                x2 = left + phi * (right - left)
                f2 = total(x2)
        best = min(best, f1, f2)
    return best


def roll_dubins_word(word: str, segment_params, radius: float, start_pose):
    """Endpoint pose after following the word's arcs/straight exactly."""
    x, y, psi = start_pose
    for seg, kind in zip(segment_params, word):
        if kind == "S":
            x += radius * seg * math.cos(psi)
            y += radius * seg * math.sin(psi)
        else:
            sgn = 1.0 if kind == "L" else -1.0
            cx = x - sgn * math.sin(psi) * radius
            cy = y + sgn * math.cos(psi) * radius
            psi += sgn * seg
            x = cx + sgn * math.sin(psi) * radius
            y = cy - sgn * math.cos(psi) * radius
    return x, y, psi % TWO_PI


def brute_force_tour(tensor) -> float:
    """Exhaustive optimum over all cyclic orders and configuration choices.

    Enumerates every configuration tuple as a flat index grid; no dynamic
    programming structure anywhere.
    """
    C = tensor.flat()
    n, k = tensor.n, tensor.config_count
    cfgs = np.indices((k,) * n).reshape(n, -1)
    best = math.inf
    for perm in itertools.permutations(range(1, n)):
        order = (0,) + perm
        tot = np.zeros(cfgs.shape[1])
        for t in range(n):
            tot = tot + C[order[t], cfgs[t], order[(t + 1) % n], cfgs[(t + 1) % n]]
        best = min(best, float(tot.min()))
    return best


def brute_force_configs(tensor, order) -> float:
    """Exhaustive optimum over configurations for a fixed cyclic order."""
    C = tensor.flat()
    idx = [w - 1 for w in order]
    k = tensor.config_count
    m = len(idx)
    best = math.inf
    for cfgs in itertools.product(range(k), repeat=m):
        tot = 0.0
        for t in range(m):
            tot += C[idx[t], cfgs[t], idx[(t + 1) % m], cfgs[(t + 1) % m]]
        best = min(best, tot)
    return best


def reintegrate_samples(rows):
    """Trapezoidal re-integration of sampled velocities back to positions."""
    xs = [rows[0][1]]
    ys = [rows[0][2]]
    for (t0, _, _, vx0, vy0, *_), (t1, _, _, vx1, vy1, *_) in zip(rows, rows[1:]):
        h = t1 - t0
        xs.append(xs[-1] + 0.5 * h * (vx0 + vx1))
        ys.append(ys[-1] + 0.5 * h * (vy0 + vy1))
    return xs, ys
