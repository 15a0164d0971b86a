"""Domain model: waypoints, kinematic limits, and heading/speed discretization."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi
SQRT2 = math.sqrt(2.0)


def canonicalize_heading(theta: float) -> float:
    """Wrap an angle into (0, 2*pi], the range spanned by the heading grid."""
    r = math.fmod(theta, TWO_PI)
    if r <= 0.0:
        r += TWO_PI
    return r


def standard_heading(theta: float) -> float:
    """Convert a grid heading (clockwise from +y) to a math-convention angle.

    Headings here measure the direction of travel clockwise from the +y axis,
    so the velocity components are (sin(theta), cos(theta)).  The returned
    angle psi = pi/2 - theta is measured counterclockwise from +x and lies in
    [0, 2*pi).  This is the single conversion point used for Dubins poses.
    """
    psi = math.fmod(math.pi / 2.0 - theta, TWO_PI)
    if psi < 0.0:
        psi += TWO_PI
    return psi


@dataclass(frozen=True)
class KinematicLimits:
    """Planar speed and acceleration magnitude bounds.

    Per-axis bounds carry the 1/sqrt(2) split so that independently planned
    axis trajectories stay jointly feasible in the plane.
    """

    v_max: float  # m/s
    a_max: float  # m/s^2

    def __post_init__(self):
        if not (self.v_max > 0.0 and self.a_max > 0.0):
            raise ValueError("v_max and a_max must be strictly positive")

    @property
    def v_axis(self) -> float:
        return self.v_max / SQRT2

    @property
    def a_axis(self) -> float:
        return self.a_max / SQRT2


@dataclass(frozen=True)
class Waypoint:
    id: int  # 1-based, contiguous
    x: float  # m
    y: float  # m


def heading_set(count: int) -> tuple[float, ...]:
    """Equidistant headings 2*pi*i/count for i = 1..count, ascending in (0, 2*pi]."""
    if count < 1:
        raise ValueError("heading count must be >= 1")
    return tuple(TWO_PI * (i + 1) / count for i in range(count))


def make_speed_set(fractions, limits: KinematicLimits) -> tuple[float, ...]:
    """Scale unit fractions by the per-axis speed bound v_max/sqrt(2).

    Fractions must be strictly increasing and lie in (0, 1]; the result is the
    admissible waypoint-speed grid.
    """
    fractions = tuple(float(f) for f in fractions)
    if not fractions:
        raise ValueError("need at least one speed fraction")
    for f in fractions:
        if not (0.0 < f <= 1.0):
            raise ValueError(f"speed fraction {f} outside (0, 1]")
    if any(b <= a for a, b in zip(fractions, fractions[1:])):
        raise ValueError("speed fractions must be strictly increasing")
    return tuple(f * limits.v_axis for f in fractions)


@dataclass(frozen=True)
class DiscretizationScheme:
    """Heading and speed grids a waypoint may be traversed with."""

    headings: tuple[float, ...]  # rad, equidistant in (0, 2*pi]
    speeds: tuple[float, ...]  # m/s, strictly increasing, >= 0

    def __post_init__(self):
        object.__setattr__(self, "headings", tuple(float(t) for t in self.headings))
        object.__setattr__(self, "speeds", tuple(float(s) for s in self.speeds))
        if not self.headings or not self.speeds:
            raise ValueError("headings and speeds must be non-empty")
        expected = heading_set(len(self.headings))
        for got, want in zip(self.headings, expected):
            if abs(got - want) > 1e-9:
                raise ValueError("headings must be the equidistant grid 2*pi*i/count")
        if any(s < 0.0 for s in self.speeds):
            raise ValueError("speeds must be non-negative")
        if any(b <= a for a, b in zip(self.speeds, self.speeds[1:])):
            raise ValueError("speeds must be strictly increasing")

    @classmethod
    def from_counts(cls, headings_count: int, fractions, limits: KinematicLimits) -> "DiscretizationScheme":
        return cls(heading_set(headings_count), make_speed_set(fractions, limits))

    @property
    def config_count(self) -> int:
        return len(self.headings) * len(self.speeds)


@dataclass(frozen=True)
class Configuration:
    """One traversal choice at a waypoint: (waypoint id, heading index, speed index)."""

    waypoint: int
    heading_idx: int
    speed_idx: int


def config_velocity(cfg: Configuration, scheme: DiscretizationScheme) -> tuple[float, float]:
    """Planar velocity (v_x, v_y) = (sin(theta)*v, cos(theta)*v) for a configuration."""
    theta = scheme.headings[cfg.heading_idx]
    v = scheme.speeds[cfg.speed_idx]
    return (math.sin(theta) * v, math.cos(theta) * v)


@dataclass(frozen=True)
class Instance:
    """A routing instance: waypoints to visit plus limits and discretization."""

    waypoints: tuple[Waypoint, ...]
    limits: KinematicLimits
    scheme: DiscretizationScheme

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        if len(self.waypoints) < 2:
            raise ValueError("an instance needs at least 2 waypoints")
        ids = [w.id for w in self.waypoints]
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError("waypoint ids must be contiguous from 1, in order")
        v_axis = self.limits.v_axis
        for s in self.scheme.speeds:
            if s > v_axis + 1e-12:
                raise ValueError(f"speed {s} exceeds per-axis bound {v_axis}")

    @property
    def n(self) -> int:
        return len(self.waypoints)


def make_grid_instance(rows: int, cols: int, spacing: float,
                       limits: KinematicLimits, scheme: DiscretizationScheme) -> Instance:
    """Regular rows x cols grid with the given spacing, ids row-major from 1."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    if rows * cols < 2:
        raise ValueError("a grid instance needs at least 2 waypoints")
    if spacing <= 0.0:
        raise ValueError("spacing must be positive")
    wps = []
    for r in range(rows):
        for c in range(cols):
            wps.append(Waypoint(id=r * cols + c + 1, x=c * spacing, y=r * spacing))
    return Instance(tuple(wps), limits, scheme)


# --- instance file format -------------------------------------------------
#
# A single JSON document: waypoints (array of {id,x,y}), v_max, a_max,
# headings_count, speed_fractions.  Cache keys hash the canonical rendering
# below (sorted keys, floats with 12 significant digits).


def _render(value) -> str:
    if isinstance(value, bool):
        raise TypeError("booleans have no canonical form here")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".12g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_render(v) for v in value) + "]"
    if isinstance(value, dict):
        items = sorted(value.items())
        return "{" + ",".join(f"{json.dumps(k)}:{_render(v)}" for k, v in items) + "}"
    raise TypeError(f"cannot render {type(value)!r}")


def instance_document(instance: Instance) -> dict:
    """The JSON document describing an instance (fractions relative to v_max/sqrt(2))."""
    v_axis = instance.limits.v_axis
    return {
        "waypoints": [{"id": w.id, "x": float(w.x), "y": float(w.y)} for w in instance.waypoints],
        "v_max": instance.limits.v_max,
        "a_max": instance.limits.a_max,
        "headings_count": len(instance.scheme.headings),
        "speed_fractions": [s / v_axis for s in instance.scheme.speeds],
    }


def canonical_instance_json(instance: Instance) -> str:
    return _render(instance_document(instance))


def instance_hash(instance: Instance) -> str:
    """SHA-256 of the canonical serialization; used as the cache key."""
    return hashlib.sha256(canonical_instance_json(instance).encode("ascii")).hexdigest()


def instance_to_json(instance: Instance, indent: int | None = 2) -> str:
    return json.dumps(instance_document(instance), indent=indent, sort_keys=True)


def instance_from_document(doc: dict) -> Instance:
    limits = KinematicLimits(float(doc["v_max"]), float(doc["a_max"]))
    scheme = DiscretizationScheme.from_counts(int(doc["headings_count"]),
                                              doc["speed_fractions"], limits)
    wps = sorted(doc["waypoints"], key=lambda w: int(w["id"]))
    waypoints = tuple(Waypoint(int(w["id"]), float(w["x"]), float(w["y"])) for w in wps)
    return Instance(waypoints, limits, scheme)


def instance_from_json(text: str) -> Instance:
    return instance_from_document(json.loads(text))
