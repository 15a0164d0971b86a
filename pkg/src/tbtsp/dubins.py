"""Shortest Dubins paths between oriented poses and constant-speed travel times."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import KinematicLimits

TWO_PI = 2.0 * math.pi

WORDS = ("LSL", "RSR", "LSR", "RSL", "RLR", "LRL")


def mod2pi(x: float) -> float:
    r = math.fmod(x, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    return r


@dataclass(frozen=True)
class Pose:
    """Planar pose with math-convention heading (from +x, counterclockwise)."""

    x: float
    y: float
    psi: float

    def __post_init__(self):
        object.__setattr__(self, "psi", mod2pi(self.psi))


@dataclass(frozen=True)
class DubinsPath:
    word: str
    segment_params: tuple[float, float, float]  # radius-normalized lengths
    radius: float

    @property
    def length(self) -> float:
        return self.radius * sum(self.segment_params)


def min_turn_radius(limits: KinematicLimits) -> float:
    """Turning radius v_max^2/a_max of the constant-speed vehicle."""
    return limits.v_max * limits.v_max / limits.a_max


# Each word solver works in the normalized frame: radius 1, start (0,0,alpha),
# goal (d,0,beta).  The first arc and straight come from tangent-circle
# geometry; the closing arc always follows from heading closure.


def _lsl(alpha, beta, d):
    p_sq = 2.0 + d * d - 2.0 * math.cos(alpha - beta) \
        + 2.0 * d * (math.sin(alpha) - math.sin(beta))
    if p_sq < 0.0:
        return None
    phi = math.atan2(math.cos(beta) - math.cos(alpha),
                     d + math.sin(alpha) - math.sin(beta))
    t = mod2pi(phi - alpha)
    q = mod2pi(beta - alpha - t)
    return (t, math.sqrt(p_sq), q)


def _rsr(alpha, beta, d):
    p_sq = 2.0 + d * d - 2.0 * math.cos(alpha - beta) \
        + 2.0 * d * (math.sin(beta) - math.sin(alpha))
    if p_sq < 0.0:
        return None
    phi = math.atan2(math.cos(alpha) - math.cos(beta),
                     d - math.sin(alpha) + math.sin(beta))
    t = mod2pi(alpha - phi)
    q = mod2pi(alpha - beta - t)
    return (t, math.sqrt(p_sq), q)


def _lsr(alpha, beta, d):
    p_sq = -2.0 + d * d + 2.0 * math.cos(alpha - beta) \
        + 2.0 * d * (math.sin(alpha) + math.sin(beta))
    if p_sq < 0.0:
        return None
    p = math.sqrt(p_sq)
    phi = math.atan2(-math.cos(alpha) - math.cos(beta),
                     d + math.sin(alpha) + math.sin(beta)) + math.atan2(2.0, p)
    t = mod2pi(phi - alpha)
    q = mod2pi(alpha + t - beta)
    return (t, p, q)


def _rsl(alpha, beta, d):
    p_sq = -2.0 + d * d + 2.0 * math.cos(alpha - beta) \
        - 2.0 * d * (math.sin(alpha) + math.sin(beta))
    if p_sq < 0.0:
        return None
    p = math.sqrt(p_sq)
    phi = math.atan2(math.cos(alpha) + math.cos(beta),
                     d - math.sin(alpha) - math.sin(beta)) - math.atan2(2.0, p)
    t = mod2pi(alpha - phi)
    q = mod2pi(beta - alpha + t)
    return (t, p, q)


def _rlr(alpha, beta, d):
    cos_mid = (6.0 - d * d + 2.0 * math.cos(alpha - beta)
               + 2.0 * d * (math.sin(alpha) - math.sin(beta))) / 8.0
    if abs(cos_mid) > 1.0:
        return None
    p = TWO_PI - math.acos(cos_mid)
    phi = math.atan2(math.cos(alpha) - math.cos(beta),
                     d - math.sin(alpha) + math.sin(beta))
    t = mod2pi(alpha - phi + 0.5 * p)
    q = mod2pi(alpha - beta - t + p)
    return (t, p, q)


def _lrl(alpha, beta, d):
    cos_mid = (6.0 - d * d + 2.0 * math.cos(alpha - beta)
               + 2.0 * d * (math.sin(beta) - math.sin(alpha))) / 8.0
    if abs(cos_mid) > 1.0:
        return None
    p = TWO_PI - math.acos(cos_mid)
    phi = math.atan2(math.cos(beta) - math.cos(alpha),
                     d + math.sin(alpha) - math.sin(beta))
    t = mod2pi(phi - alpha + 0.5 * p)
    q = mod2pi(beta - alpha - t + p)
    return (t, p, q)


_SOLVERS = {"LSL": _lsl, "RSR": _rsr, "LSR": _lsr,
            "RSL": _rsl, "RLR": _rlr, "LRL": _lrl}


def word_candidates(a: Pose, b: Pose, radius: float):
    """All feasible words with normalized segment params, in canonical order."""
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    dx, dy = b.x - a.x, b.y - a.y
    d = math.hypot(dx, dy) / radius
    phi = math.atan2(dy, dx)
    alpha = mod2pi(a.psi - phi)
    beta = mod2pi(b.psi - phi)
    out = []
    for word in WORDS:
        params = _SOLVERS[word](alpha, beta, d)
        if params is not None:
            out.append(DubinsPath(word, params, radius))
    return out


def shortest_dubins(a: Pose, b: Pose, radius: float) -> DubinsPath:
    """Minimum-length path over the six words; ties keep the earlier word."""
    best = None
    for path in word_candidates(a, b, radius):
        if best is None or path.length < best.length:
            best = path
    assert best is not None  # LSL/RSR cover every pose pair jointly with CCC
    return best


def dubins_cost(a: Pose, b: Pose, limits: KinematicLimits) -> float:
    """Travel time: shortest path at R_min = v_max^2/a_max, flown at v_max."""
    return shortest_dubins(a, b, min_turn_radius(limits)).length / limits.v_max


def path_states(path: DubinsPath, start: Pose, arc_steps):
    """Poses along the path at the given arc-length offsets (world units)."""
    states = []
    for s in arc_steps:
        x, y, psi = start.x, start.y, start.psi
        rem = s / path.radius
        for seg, kind in zip(path.segment_params, path.word):
            step = min(rem, seg)
            if kind == "S":
                x += path.radius * step * math.cos(psi)
                y += path.radius * step * math.sin(psi)
            else:
                sgn = 1.0 if kind == "L" else -1.0
                cx = x - sgn * math.sin(psi) * path.radius
                cy = y + sgn * math.cos(psi) * path.radius
                psi_new = psi + sgn * step
                x = cx + sgn * math.sin(psi_new) * path.radius
                y = cy - sgn * math.cos(psi_new) * path.radius
                psi = psi_new
            rem -= step
            if rem <= 0.0:
                break
        states.append((x, y, mod2pi(psi)))
    return states


def sample_path(path: DubinsPath, start: Pose, speed: float, dt: float):
    """Constant-speed samples in the trajectory CSV layout (zero accelerations)."""
    if speed <= 0.0 or dt <= 0.0:
        raise ValueError("speed and dt must be positive")
    duration = path.length / speed
    steps = int(math.floor(duration / dt + 1e-9))
    ts = [i * dt for i in range(steps + 1)]
    if duration - ts[-1] > 1e-9 * max(1.0, duration):
        ts.append(duration)
    else:
        ts[-1] = duration
    rows = []
    for t, (x, y, psi) in zip(ts, path_states(path, start, [t * speed for t in ts])):
        rows.append((t, x, y, speed * math.cos(psi), speed * math.sin(psi), 0.0, 0.0))
    return rows
