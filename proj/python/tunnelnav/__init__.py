"""Python interface to the tunnelnav C++ library."""

from ._tunnelnav import (
    ControllerConfig,
    DirectionEstimate,
    Projection,
    RayScan,
    SensorConfig,
    ShapeFrame,
    Tunnel,
    TunnelError,
    Zone,
    audit,
    mdpbe,
    offset_point,
    project,
    ray_distance,
    scan,
    simulate,
    simulate_scenario,
    sine_angle_scaling,
    surface_frame,
)

__all__ = [
    "ControllerConfig",
    "DirectionEstimate",
    "Projection",
    "RayScan",
    "SensorConfig",
    "ShapeFrame",
    "Tunnel",
    "TunnelError",
    "Zone",
    "audit",
    "mdpbe",
    "offset_point",
    "project",
    "ray_distance",
    "scan",
    "simulate",
    "simulate_scenario",
    "sine_angle_scaling",
    "surface_frame",
]
