"""hopbeam: multi-hop multi-RIS downlink planning.

Builds LoS channels from scenario geometry, selects each user's best
multi-reflection path, partitions users into interference-free activation
groups, and jointly optimizes base-station beamforming and group time shares
for max-min fairness.
"""

from .scenario import Scenario, ScenarioError, load_scenario
from .pipeline import RunOptions, SweepSpec, run_pipeline, run_sweep
from .solver_backend import BACKEND

__all__ = [
    "Scenario", "ScenarioError", "load_scenario",
    "RunOptions", "SweepSpec", "run_pipeline", "run_sweep",
    "BACKEND",
]

__version__ = "0.1.0"
