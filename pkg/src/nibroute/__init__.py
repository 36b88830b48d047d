"""Communication-aware path planning for a network-in-a-box ship fleet."""

from .errors import InfeasibleError, ProblemTooLarge, ScenarioError
from .evaluator import RateTimeline, evaluate_trajectory, snr_sweep
from .geometry import FerryRoute, Position, Trajectory, distance, ferry_position_at, trajectory_feasible
from .link_budget import LinkSample, NetworkNode, best_link, sample_link
from .planner import PlanResult, brute_force_plan, plan_rate_max, plan_uniform_shortest
from .scenario import Scenario, dump_scenario, load_scenario, reference_scenario

__version__ = "0.1.0"
