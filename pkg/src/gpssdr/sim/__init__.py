from .lnav_encode import EncodeError, encode_lnav
from .scenario import SatScenario, Scenario, load_scenario
from .generator import Simulator, simulate_to_array, simulate_to_file

__all__ = [
    "encode_lnav", "EncodeError", "SatScenario", "Scenario", "load_scenario",
    "Simulator", "simulate_to_array", "simulate_to_file",
]
