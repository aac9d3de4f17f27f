import copy
import json

import pytest

from isacsim import scenario as scn_mod


@pytest.fixture(scope="session")
def bundled_doc():
    with open(scn_mod.bundled_scenario_path(), encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def bundled(bundled_doc):
    return scn_mod.scenario_from_dict(bundled_doc)


@pytest.fixture
def doc(bundled_doc):
    """Mutable copy of the bundled scenario document."""
    return copy.deepcopy(bundled_doc)


def minimal_doc(**over):
    """Small single-cluster scenario for fast targeted tests."""
    d = {
        "carrier": {"frequency_hz": 28e9, "ray_count": 8},
        "sensing_mode": "bistatic",
        "seed": 1,
        "nodes": {
            "bs_tx": {"height_m": 25.0, "element_count": 2,
                      "spacing_wavelengths": 0.5},
            "echo_rx": {"position_m": [60.0, -20.0, 25.0],
                        "element_count": 2, "spacing_wavelengths": 0.5},
            "comm_rx": {"range_m": 100.0, "element_count": 2,
                        "spacing_wavelengths": 0.5, "speed_mps": 4.0,
                        "heading_deg": 20.0},
            "terminal_rcs_m2": 50.0,
        },
        "targets": [
            {"id": "t1", "position_m": [50.0, 30.0, 5.0], "rcs_m2": 10.0},
        ],
        "clusters": [
            {"id": "c1", "position_m": [70.0, 40.0, 8.0],
             "power_weight": 1.0, "ray_extent_m": 5.0},
        ],
    }
    d.update(over)
    return d
