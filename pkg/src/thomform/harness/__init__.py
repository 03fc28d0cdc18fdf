"""Scenario runners, instance generators, reports and the command line."""

from .generators import random_partition_of_unity, random_skew_jet, random_skew_forms, random_jet
from .report import VerificationReport
from .scenarios import SCENARIOS, ScenarioSpec, run_scenario

__all__ = [
    "random_partition_of_unity", "random_skew_jet", "random_skew_forms", "random_jet",
    "VerificationReport", "SCENARIOS", "ScenarioSpec", "run_scenario",
]
