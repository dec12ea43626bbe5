"""Fixed-step closed-loop simulation, traces and metrics."""
from .integrate import step_euler, step_rk4
from .loop import run_scenario
from .metrics import (
    MetricsReport,
    Overshoot,
    SteadyCheck,
    chattering_index,
    check_steady_bounds,
    compute_metrics,
    detect_overshoot,
    measure_settling,
)
from .trace import Event, SimConfig, Trace, read_csv, write_events

__all__ = [
    "step_rk4", "step_euler", "run_scenario", "MetricsReport", "Overshoot", "SteadyCheck",
    "chattering_index", "check_steady_bounds", "compute_metrics", "detect_overshoot",
    "measure_settling", "Event", "SimConfig", "Trace", "read_csv", "write_events",
]
