"""Time-optimal 1D trajectories under velocity/acceleration box constraints.

Each axis trajectory has three phases of constant acceleration (accelerate,
coast, decelerate); the planar trajectory solves both axes independently with
the 1/sqrt(2)-split limits and takes the slower axis as the total duration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import KinematicLimits

TIME_TOL = 1e-9  # phase times in [-TIME_TOL, 0) are clamped to zero
VEL_TOL = 1e-9  # velocity-limit slack


class RetimeError(RuntimeError):
    """No admissible acceleration magnitude stretches the profile to the target."""


@dataclass(frozen=True)
class AxisLimits:
    v_axis: float  # m/s
    a_axis: float  # m/s^2

    def __post_init__(self):
        if not (self.v_axis > 0.0 and self.a_axis > 0.0):
            raise ValueError("axis limits must be strictly positive")


@dataclass(frozen=True)
class AxisBoundary:
    p_s: float  # m
    v_s: float  # m/s
    p_e: float  # m
    v_e: float  # m/s

    def reflected(self) -> "AxisBoundary":
        return AxisBoundary(-self.p_s, -self.v_s, -self.p_e, -self.v_e)


@dataclass(frozen=True)
class AxisTrajectory:
    """3-phase profile: accelerations (a0, 0, a2) over durations (t1, t2, t3)."""

    boundary: AxisBoundary
    a0: float
    a1: float
    a2: float
    t1: float
    t2: float
    t3: float
    p1: float  # state at the end of phase 1
    v1: float
    p2: float  # state at the end of phase 2
    v2: float

    @property
    def duration(self) -> float:
        return self.t1 + self.t2 + self.t3

    def evaluate(self, t: float) -> tuple[float, float, float]:
        """Position, velocity, acceleration at time t (clamped to [0, duration])."""
        b = self.boundary
        tt = min(max(t, 0.0), self.duration)
        if tt <= self.t1:
            p0, v0, a, tau = b.p_s, b.v_s, self.a0, tt
        elif tt <= self.t1 + self.t2:
            p0, v0, a, tau = self.p1, self.v1, self.a1, tt - self.t1
        else:
            p0, v0, a, tau = self.p2, self.v2, self.a2, tt - self.t1 - self.t2
        return (p0 + v0 * tau + 0.5 * a * tau * tau, v0 + a * tau, a)

    def evaluate_many(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        b = self.boundary
        tt = np.clip(ts, 0.0, self.duration)
        starts = np.array([0.0, self.t1, self.t1 + self.t2])
        p0 = np.array([b.p_s, self.p1, self.p2])
        v0 = np.array([b.v_s, self.v1, self.v2])
        acc = np.array([self.a0, self.a1, self.a2])
        idx = np.minimum(np.searchsorted(starts, tt, side="right") - 1, 2)
        tau = tt - starts[idx]
        return (p0[idx] + v0[idx] * tau + 0.5 * acc[idx] * tau * tau,
                v0[idx] + acc[idx] * tau, acc[idx])


def _chain(boundary: AxisBoundary, a0: float, a2: float,
           t1: float, t2: float, t3: float) -> AxisTrajectory:
    p1 = boundary.p_s + boundary.v_s * t1 + 0.5 * a0 * t1 * t1
    v1 = boundary.v_s + a0 * t1
    p2 = p1 + v1 * t2
    v2 = v1
    return AxisTrajectory(boundary, a0, 0.0, a2, t1, t2, t3, p1, v1, p2, v2)


def solve_axis_case(boundary: AxisBoundary, limits: AxisLimits,
                    case: int) -> AxisTrajectory | None:
    """Solve one acceleration-profile template; None when the case is infeasible.

    Case 1: accelerate, coast at +v_axis, decelerate (trapezoid).
    Case 2: accelerate, decelerate, no coast (triangle).
    Cases 3/4: sign-mirrored counterparts coasting at / peaking below -v_axis.
    """
    if case not in (1, 2, 3, 4):
        raise ValueError(f"unknown case {case}")
    a, v = limits.a_axis, limits.v_axis
    vs, ve = boundary.v_s, boundary.v_e
    if abs(vs) > v + VEL_TOL or abs(ve) > v + VEL_TOL:
        raise ValueError("boundary velocities exceed the axis speed limit")
    d = boundary.p_e - boundary.p_s
    sign = 1.0 if case in (1, 2) else -1.0
    a0 = sign * a
    a2 = -a0

    if case in (1, 3):
        v1 = sign * v
        t1 = (v1 - vs) / a0
        t3 = (ve - v1) / a2
        if t1 < -TIME_TOL or t3 < -TIME_TOL:
            return None
        t1 = max(t1, 0.0)
        t3 = max(t3, 0.0)
        d1 = vs * t1 + 0.5 * a0 * t1 * t1
        d3 = v1 * t3 + 0.5 * a2 * t3 * t3
        t2 = (d - d1 - d3) / v1
        if t2 < -TIME_TOL:
            return None
        return _chain(boundary, a0, a2, t1, max(t2, 0.0), t3)

    # Triangle: the peak velocity solves a quadratic; try both roots and keep
    # the faster admissible one.
    best = None
    for root_sign in (1.0, -1.0):
        cand = _triangle_branch(boundary, limits, a0, root_sign)
        if cand is not None and (best is None or cand.duration < best.duration):
            best = cand
    return best


def _triangle_branch(boundary: AxisBoundary, limits: AxisLimits,
                     a0: float, root_sign: float) -> AxisTrajectory | None:
    """Coast-free profile whose peak velocity is one specific quadratic root."""
    a, v = limits.a_axis, limits.v_axis
    vs, ve = boundary.v_s, boundary.v_e
    d = boundary.p_e - boundary.p_s
    disc = a0 * d + 0.5 * (vs * vs + ve * ve)
    if disc < 0.0:
        # keep zero-peak solutions evaluable exactly at the feasibility edge
        if disc < -1e-12 * (abs(a0 * d) + vs * vs + ve * ve + 1e-12):
            return None
        disc = 0.0
    v1 = root_sign * math.sqrt(disc)
    t1 = (v1 - vs) / a0
    t3 = (ve - v1) / (-a0)
    if t1 < -TIME_TOL or t3 < -TIME_TOL or abs(v1) > v + VEL_TOL:
        return None
    return _chain(boundary, a0, -a0, max(t1, 0.0), 0.0, max(t3, 0.0))


def axis_time_optimal(boundary: AxisBoundary, limits: AxisLimits) -> AxisTrajectory:
    """Fastest feasible 3-phase profile; ties go to the lowest case number."""
    best = None
    for case in (1, 2, 3, 4):
        sol = solve_axis_case(boundary, limits, case)
        if sol is not None and (best is None or sol.duration < best.duration):
            best = sol
    if best is None:  # cannot happen for in-range boundary velocities
        raise RuntimeError(f"no feasible acceleration profile for {boundary}")
    return best


def axis_duration_batch(d: np.ndarray, v_s: np.ndarray, v_e: np.ndarray,
                        limits: AxisLimits) -> np.ndarray:
    """Vectorized minimal durations, matching axis_time_optimal case by case."""
    a, v = limits.a_axis, limits.v_axis
    d = np.asarray(d, dtype=np.float64)
    v_s = np.asarray(v_s, dtype=np.float64)
    v_e = np.asarray(v_e, dtype=np.float64)
    total = np.full(np.broadcast_shapes(d.shape, v_s.shape, v_e.shape), np.inf)

    for sign in (1.0, -1.0):  # cases 1 and 3
        a0 = sign * a
        v1 = sign * v
        t1 = np.maximum((v1 - v_s) / a0, 0.0)
        t3 = np.maximum((v_e - v1) / (-a0), 0.0)
        d1 = v_s * t1 + 0.5 * a0 * t1 * t1
        d3 = v1 * t3 - 0.5 * a0 * t3 * t3
        t2 = (d - d1 - d3) / v1
        ok = t2 >= -TIME_TOL
        cand = np.where(ok, t1 + np.maximum(t2, 0.0) + t3, np.inf)
        total = np.minimum(total, cand)

    for sign in (1.0, -1.0):  # cases 2 and 4
        a0 = sign * a
        disc = a0 * d + 0.5 * (v_s * v_s + v_e * v_e)
        root = np.sqrt(np.maximum(disc, 0.0))
        for v1 in (root, -root):
            t1 = (v1 - v_s) / a0
            t3 = (v_e - v1) / a0 * -1.0
            ok = ((disc >= 0.0) & (t1 >= -TIME_TOL) & (t3 >= -TIME_TOL)
                  & (np.abs(v1) <= v + VEL_TOL))
            cand = np.where(ok, np.maximum(t1, 0.0) + np.maximum(t3, 0.0), np.inf)
            total = np.minimum(total, cand)

    return total


@dataclass(frozen=True)
class PlanarTrajectory:
    """Two re-timed axis profiles sharing the slower axis' duration.

    When re-timing has to fall back to holding a rest end state, the slack
    axis keeps its shorter time-optimal profile and evaluation clamps past its
    end (position held, zero velocity and acceleration).
    """

    x_axis: AxisTrajectory
    y_axis: AxisTrajectory
    duration: float

    @property
    def synchronized(self) -> bool:
        return (abs(self.x_axis.duration - self.duration) <= 1e-6
                and abs(self.y_axis.duration - self.duration) <= 1e-6)

    def evaluate(self, t: float) -> tuple[float, float, float, float, float, float]:
        x, vx, ax = self._axis_state(self.x_axis, t)
        y, vy, ay = self._axis_state(self.y_axis, t)
        return (x, y, vx, vy, ax, ay)

    @staticmethod
    def _axis_state(axis: AxisTrajectory, t: float) -> tuple[float, float, float]:
        if t >= axis.duration:
            p, v, _ = axis.evaluate(axis.duration)
            # past the profile end the state is held (only reachable when the
            # axis was pad-synchronized, i.e. ends at rest)
            return (p, v, 0.0) if t > axis.duration + 1e-12 else (p, v, axis.a2)
        return axis.evaluate(t)


def position_hold_duration(speed: float, limits: AxisLimits) -> float:
    """Shortest out-and-back profile re-entering the same position at the same speed.

    An axis whose time-optimal duration is zero (coincident endpoints, equal
    boundary velocities) cannot be stretched at all while its boundary keeps
    moving: the profile family jumps from duration 0 straight to this loop
    (brake through reverse, return, accelerate back), which therefore bounds
    the synchronizable planar duration from below.
    """
    return 4.0 * abs(speed) / limits.a_axis


def _effective_duration(traj: AxisTrajectory, limits: AxisLimits) -> float:
    if traj.duration > 0.0:
        return traj.duration
    return position_hold_duration(traj.boundary.v_s, limits)


def planar_duration(start_pos, start_vel, end_pos, end_vel,
                    limits: KinematicLimits) -> float:
    """Travel-time cost: the larger effective axis duration, no re-timing.

    This is the analytic kernel edge costs are built from; a degenerate axis
    (zero time-optimal duration with a moving boundary) contributes its
    position-hold loop time, since no shorter profile keeps it in place while
    the other axis flies.
    """
    axis_limits = AxisLimits(limits.v_axis, limits.a_axis)
    tx = axis_time_optimal(
        AxisBoundary(start_pos[0], start_vel[0], end_pos[0], end_vel[0]), axis_limits)
    ty = axis_time_optimal(
        AxisBoundary(start_pos[1], start_vel[1], end_pos[1], end_vel[1]), axis_limits)
    return max(_effective_duration(tx, axis_limits),
               _effective_duration(ty, axis_limits))


def planar_time_optimal(start_pos, start_vel, end_pos, end_vel,
                        limits: KinematicLimits) -> PlanarTrajectory:
    """Per-axis time-optimal solve; the slack axis is re-timed to the maximum.

    The duration equals planar_duration for the same boundaries; building the
    synchronized profiles can additionally raise RetimeError for boundaries
    whose slack axis cannot be stretched across a reachability gap.
    """
    axis_limits = AxisLimits(limits.v_axis, limits.a_axis)
    tx = axis_time_optimal(
        AxisBoundary(start_pos[0], start_vel[0], end_pos[0], end_vel[0]), axis_limits)
    ty = axis_time_optimal(
        AxisBoundary(start_pos[1], start_vel[1], end_pos[1], end_vel[1]), axis_limits)
    duration = max(_effective_duration(tx, axis_limits),
                   _effective_duration(ty, axis_limits))
    if duration - tx.duration > 1e-12:
        tx = _sync_axis(tx, duration, axis_limits)
    if duration - ty.duration > 1e-12:
        ty = _sync_axis(ty, duration, axis_limits)
    return PlanarTrajectory(tx, ty, duration)


def _sync_axis(traj: AxisTrajectory, duration: float,
               limits: AxisLimits) -> AxisTrajectory:
    b = traj.boundary
    if traj.duration == 0.0 and abs(b.v_s) > 0.0:
        # symmetric out-and-back loop: brake through -v_s and return; legs of
        # duration/2 each give exactly the hold loop scaled to the target
        sgn = 1.0 if b.v_s > 0.0 else -1.0
        alpha = 4.0 * abs(b.v_s) / duration
        leg = 0.5 * duration
        return _chain(b, -sgn * alpha, sgn * alpha, leg, 0.0, leg)
    return _retime_or_pad(traj, duration, limits)


def _retime_or_pad(traj: AxisTrajectory, target: float,
                   limits: AxisLimits) -> AxisTrajectory:
    try:
        return retime_axis(traj, target, limits)
    except RetimeError:
        if abs(traj.boundary.v_e) <= 1e-12:
            return traj  # held at rest past its own end by evaluation
        raise


# Profile branches searched during re-timing: the trapezoids plus each
# quadratic root of the two triangle templates (every branch has a continuous
# duration in the acceleration magnitude alpha).
_RETIME_BRANCHES = ((1, 0.0), (2, 1.0), (2, -1.0), (3, 0.0), (4, 1.0), (4, -1.0))


def retime_axis(traj: AxisTrajectory, target_T: float,
                limits: AxisLimits) -> AxisTrajectory:
    """Stretch a profile to a longer duration with the same boundary states.

    Searches each case template (triangles per quadratic root) for an
    acceleration magnitude alpha in (0, a_axis] whose analytic duration equals
    target_T, bracketing on a grid and bisecting.  Raises RetimeError when no
    branch bridges the target, which can happen for boundaries moving fast
    through a short axis.
    """
    current = traj.duration
    if target_T < current - 1e-9:
        raise ValueError("target duration is below the time-optimal duration")
    if target_T <= current + 1e-12:
        return traj
    b = traj.boundary
    if (abs(b.p_e - b.p_s) <= 1e-12 and abs(b.v_s) <= 1e-12
            and abs(b.v_e) <= 1e-12):
        return _chain(b, 0.0, 0.0, 0.0, target_T, 0.0)  # stationary hover
    for case, root_sign in _RETIME_BRANCHES:
        sol = _retime_branch(b, limits, case, root_sign, target_T)
        if sol is not None:
            return sol
    raise RetimeError(
        f"no 3-phase profile of duration {target_T} for boundary {b}")


def _branch_alpha_window(b: AxisBoundary, limits: AxisLimits, case: int,
                         root_sign: float) -> tuple[float, float] | None:
    """Closed-form feasible interval of acceleration magnitudes for a branch.

    Every branch constraint (nonnegative phase times, real root, peak within
    the speed limit) reduces to a bound on a quantity linear in alpha, so the
    feasible set is one interval; windows can be arbitrarily narrow, which is
    why they are computed exactly rather than scanned for.
    """
    a_max, v = limits.a_axis, limits.v_axis
    vs, ve = b.v_s, b.v_e
    d = b.p_e - b.p_s
    tiny = 1e-300

    if case in (1, 3):
        sign = 1.0 if case == 1 else -1.0
        # coasting at sign*v; t2 >= 0 forces enough acceleration authority
        spread = (2.0 * v * v - vs * vs - ve * ve) / 2.0
        prog = sign * d
        if spread <= 0.0:  # both boundary velocities already at the limit
            return (tiny, a_max) if prog >= 0.0 else None
        if prog <= 0.0:
            return None
        lo = spread / prog
        return (lo, a_max) if lo <= a_max else None

    sigma = 1.0 if case == 2 else -1.0
    k = 0.5 * (vs * vs + ve * ve)
    # D(alpha) = sigma*alpha*d + k is the squared peak velocity; nonnegative
    # phase times read sigma*root_sign*sqrt(D) >= sigma*w per boundary velocity
    d_lo, d_hi = 0.0, v * v
    for w in (vs, ve):
        if sigma * root_sign > 0:
            if sigma * w > 0.0:  # sqrt(D) >= sigma*w
                d_lo = max(d_lo, w * w)
        else:
            if sigma * w > 0.0:  # sqrt(D) <= -sigma*w is unsatisfiable
                return None
            d_hi = min(d_hi, w * w)
    if d_lo > d_hi:
        return None
    slope = sigma * d
    if slope == 0.0:
        return (tiny, a_max) if d_lo <= k <= d_hi else None
    a1 = (d_lo - k) / slope
    a2 = (d_hi - k) / slope
    lo, hi = (a1, a2) if a1 <= a2 else (a2, a1)
    lo = max(lo, tiny)
    hi = min(hi, a_max)
    return (lo, hi) if lo <= hi else None


def _retime_branch(b: AxisBoundary, limits: AxisLimits, case: int,
                   root_sign: float, target: float) -> AxisTrajectory | None:
    tol = 1e-9 * max(1.0, target)

    def solve(alpha: float) -> AxisTrajectory | None:
        al = AxisLimits(limits.v_axis, alpha)
        if case in (1, 3):
            return solve_axis_case(b, al, case)
        return _triangle_branch(b, al, alpha if case == 2 else -alpha, root_sign)

    def dur(alpha: float) -> float | None:
        sol = solve(alpha)
        return None if sol is None else sol.duration

    window = _branch_alpha_window(b, limits, case, root_sign)
    if window is None:
        return None
    lo, hi = window

    # sample the window: linear coverage for narrow windows plus geometric
    # spacing toward alpha -> 0 where durations blow up like 1/alpha
    alphas = {lo, hi}
    alphas.update(lo + (hi - lo) * j / 32.0 for j in range(1, 32))
    g = hi
    while g > lo * 1.0001 and g > 1e-16 * hi:
        alphas.add(g)
        g *= 0.6
    pts = []
    for alpha in sorted(alphas, reverse=True):
        T = dur(alpha)
        if T is not None:
            pts.append((alpha, T))

    for (a1, t1), (a2, t2) in zip(pts, pts[1:]):
        if abs(t1 - target) <= tol:
            return solve(a1)
        if (t1 - target) * (t2 - target) > 0.0:
            continue
        lo_a, lo_T, hi_a, hi_T = a1, t1, a2, t2
        for _ in range(200):
            mid = 0.5 * (lo_a + hi_a)
            T = dur(mid)
            if T is None:
                break  # numeric feasibility edge inside the bracket
            if abs(T - target) <= tol:
                return solve(mid)
            if (lo_T - target) * (T - target) <= 0.0:
                hi_a, hi_T = mid, T
            else:
                lo_a, lo_T = mid, T
    if pts and abs(pts[-1][1] - target) <= tol:
        return solve(pts[-1][0])
    return None


def sample(traj: PlanarTrajectory, dt: float) -> list[tuple[float, ...]]:
    """States at t = 0, dt, 2dt, ... plus exactly t = duration."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    duration = traj.duration
    steps = int(math.floor(duration / dt + 1e-9))
    ts = [i * dt for i in range(steps + 1)]
    if duration - ts[-1] > 1e-9 * max(1.0, duration):
        ts.append(duration)
    else:
        ts[-1] = duration
    return [(t, *traj.evaluate(t)) for t in ts]


SAMPLE_HEADER = "t,x,y,vx,vy,ax,ay"


def format_sample_rows(rows) -> str:
    lines = [SAMPLE_HEADER]
    for row in rows:
        lines.append(",".join(format(v, ".9g") for v in row))
    return "\n".join(lines) + "\n"


def write_samples_csv(rows, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_sample_rows(rows))
