from .emit import emit, load_report
from .runner import NOT_APPLICABLE, RunReport, ScenarioError, diagnose, run
from .scenario import Mode, Scenario, load_scenario, parse_scenario

__all__ = [
    "NOT_APPLICABLE", "Mode", "RunReport", "Scenario", "ScenarioError",
    "diagnose", "emit", "load_report", "load_scenario", "parse_scenario", "run",
]
