"""Fuel-optimal satellite maneuvers for jamming a neighbour's uplink.

A jammer in the Hill frame of a defender first repositions to minimize the
SINR bound at the start of a communication window, then cruises through the
window trading thrust against running SINR.
"""

from .comms import CommsParams, CosinePowerPattern, sinr_gradient, sinr_upper_bound
from .cruise import CruiseProblem, solve_cruise
from .dynamics import OrbitParams, propagate, state_transition, weighted_gramian
from .kernels import BACKEND
from .reposition import RepositionProblem, solve_reposition
from .scenario import ScenarioConfig, reference_config, run_mission

__version__ = "0.1.0"
