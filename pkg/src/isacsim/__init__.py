"""Geometry-based channel simulator for a heterogeneous vehicular ISAC
system: time-varying sensing and communication CIRs coupled through
shared clusters, with spatial CCF / temporal ACF statistics."""

from . import (comm_channel, geometry, scenario, sensing_channel,
               statistics)
from .errors import (DegenerateGeometryError, IsacSimError,
                     ScenarioConfigError, UndefinedCorrelationError,
                     UnknownRcsTypeError)
from .scenario import Scenario, bundled_scenario_path, load_scenario

__all__ = [
    "comm_channel", "geometry", "scenario", "sensing_channel",
    "statistics", "Scenario", "load_scenario", "bundled_scenario_path",
    "IsacSimError", "DegenerateGeometryError", "ScenarioConfigError",
    "UndefinedCorrelationError", "UnknownRcsTypeError",
]
