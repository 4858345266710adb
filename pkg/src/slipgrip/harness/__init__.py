from .experiments import (
    FirstOrderDelayPlant,
    avoidance_test,
    bode_test,
    demo,
    demo_scenario,
    explore_test,
    hinge_test,
    linear_slip_test,
    rotational_slip_test,
    slip_test,
    step_test,
)
from .metrics import BodePoint, StepMetrics, bode_analysis, step_metrics, step_response_metrics
from .presets import OBJECT_PRESETS, SURFACE_PRESETS, object_preset
from .rig import rig_test, run_rig
from .runner import World, run_scenario
from .scenario import Scenario, load_scenario, scenario_from_dict
from .trace import COLUMNS, Trace, export_trace, import_trace

__all__ = [
    "COLUMNS", "OBJECT_PRESETS", "SURFACE_PRESETS", "BodePoint", "FirstOrderDelayPlant",
    "Scenario", "StepMetrics", "Trace", "World", "avoidance_test", "bode_analysis",
    "bode_test", "demo", "demo_scenario", "explore_test", "export_trace", "hinge_test",
    "import_trace", "linear_slip_test", "load_scenario", "object_preset", "rig_test",
    "rotational_slip_test", "run_rig", "run_scenario", "scenario_from_dict", "slip_test",
    "step_metrics", "step_response_metrics", "step_test",
]
