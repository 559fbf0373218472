"""Inverse kinematics, dynamics and tracking control for piecewise-constant-curvature soft arms.

The kinematic model replaces each constant-curvature segment with a chain of
rigid links whose lengths are stretched so the chain tip lands exactly on the
arc tip. Inverse kinematics is a warm-started bounded quasi-Newton solve over
segment lengths and bending angles.
"""

from .config import ConfigError, RobotConfig, dump_robot, load_robot, parse_robot, preset
from .control import (
    Gains,
    SimulationSettings,
    TrackingMetrics,
    TrackingTrace,
    control_law,
    simulate_tracking,
    tracking_error_metrics,
)
from .dynamics import (
    ActuationParams,
    DampingParams,
    DynamicsParams,
    DynState,
    IntegrationError,
    StiffnessParams,
    config_from_state,
    mass_matrix,
    state_from_config,
    step_dynamics,
)
from .geometry import (
    ConfigVector,
    DimensionError,
    OutOfRangeError,
    RobotSpec,
    SegmentConfig,
    SegmentSpec,
    UnreachableError,
    analytic_ik_single,
    drift_ratio,
    forward_kinematics,
    tip_jacobian,
    tip_position,
)
from .ik import IkResult, IkSettings, SecondaryTask, smoothness_ratio, solve_point, solve_trajectory
from .trajectory import Trajectory, generate, read_csv, resample, write_csv

__version__ = "0.1.0"

__all__ = [
    "ActuationParams", "ConfigError", "ConfigVector", "DampingParams", "DimensionError",
    "DynState", "DynamicsParams", "Gains", "IkResult", "IkSettings", "IntegrationError",
    "OutOfRangeError", "RobotConfig", "RobotSpec", "SecondaryTask", "SegmentConfig",
    "SegmentSpec", "SimulationSettings", "StiffnessParams", "TrackingMetrics", "TrackingTrace",
    "Trajectory", "UnreachableError", "analytic_ik_single", "config_from_state", "control_law",
    "drift_ratio", "dump_robot", "forward_kinematics", "generate", "load_robot", "mass_matrix",
    "parse_robot", "preset", "read_csv", "resample", "simulate_tracking", "smoothness_ratio",
    "solve_point", "solve_trajectory", "state_from_config", "step_dynamics", "tip_jacobian",
    "tip_position", "tracking_error_metrics", "write_csv",
]
