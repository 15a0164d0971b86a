"""Trajectory-based TSP toolkit: time-optimal edge costs, exact tours, Dubins baseline."""

from .model import (
    Configuration,
    DiscretizationScheme,
    Instance,
    KinematicLimits,
    Waypoint,
    config_velocity,
    make_grid_instance,
    make_speed_set,
)
from .trajectory import (
    AxisBoundary,
    AxisLimits,
    AxisTrajectory,
    PlanarTrajectory,
    RetimeError,
    axis_time_optimal,
    planar_duration,
    planar_time_optimal,
    position_hold_duration,
    retime_axis,
    sample,
    solve_axis_case,
)
from .dubins import DubinsPath, Pose, dubins_cost, min_turn_radius, shortest_dubins

__all__ = [
    "Configuration",
    "DiscretizationScheme",
    "Instance",
    "KinematicLimits",
    "Waypoint",
    "config_velocity",
    "make_grid_instance",
    "make_speed_set",
    "AxisBoundary",
    "AxisLimits",
    "AxisTrajectory",
    "PlanarTrajectory",
    "RetimeError",
    "axis_time_optimal",
    "planar_duration",
    "planar_time_optimal",
    "position_hold_duration",
    "retime_axis",
    "sample",
    "solve_axis_case",
    "DubinsPath",
    "Pose",
    "dubins_cost",
    "min_turn_radius",
    "shortest_dubins",
]
