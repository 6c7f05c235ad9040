from .scenario import SweepSpec, load_scenario, axis_fields
from .runner import ResultRow, run_sweep, compare_engines, evaluate_point
from .emit import emit

__all__ = [
    "SweepSpec",
    "load_scenario",
    "axis_fields",
    "ResultRow",
    "run_sweep",
    "compare_engines",
    "evaluate_point",
    "emit",
]
