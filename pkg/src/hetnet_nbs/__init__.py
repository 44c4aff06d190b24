"""Fairness-oriented user association in two-tier HetNets via Nash bargaining."""

__version__ = "0.1.0"

from .bargain import GameOutcome, InfeasibleError, is_feasible, log_nash, nash_product
from .baseline import SumRateOutcome, max_sum_rate
from .exhaustive import brute_force
from .metrics import MetricsReport, jain_index, report, srr, summarize
from .radio import Association, bs_utilities, served_rates
from .scenario import ConfigError, Scenario, ScenarioConfig, make_scenario
from .scga import scga_nbs
from .two_band import two_band_nbs

__all__ = [
    "Association", "ConfigError", "GameOutcome", "InfeasibleError", "MetricsReport",
    "Scenario", "ScenarioConfig", "SumRateOutcome", "brute_force", "bs_utilities",
    "is_feasible", "jain_index", "log_nash", "make_scenario", "max_sum_rate",
    "nash_product", "report", "scga_nbs", "served_rates", "srr", "summarize",
    "two_band_nbs",
]
