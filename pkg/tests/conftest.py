import pytest

from config.settings import NumericSettings
from scenarios import build_problem, load_scenario, scenario_settings

# Looser than the defaults so scenario-level tests stay at desk scale.
FAST_NUMERICS = {
    "rtol": 1e-8,
    "atol": 1e-10,
    "coarse_points": 12,
    "tol_r": 1e-3,
    "branch_samples": 81,
    "scan_points": 15,
}


@pytest.fixture(scope="session")
def fast_settings() -> NumericSettings:
    return NumericSettings().with_overrides(FAST_NUMERICS)


def _problem(name: str, settings: NumericSettings, **constants):
    scenario = load_scenario(name)
    for key, value in constants.items():
        scenario = scenario.with_constant(key, value)
    return build_problem(scenario, scenario_settings(scenario, settings))


@pytest.fixture(scope="session")
def make_problem(fast_settings):
    def make(name: str, **constants):
        return _problem(name, fast_settings, **constants)

    return make


@pytest.fixture(scope="session")
def sn1d(fast_settings):
    return _problem("sn1d", fast_settings)


@pytest.fixture(scope="session")
def sn1d_reversed(fast_settings):
    return _problem("sn1d-reversed", fast_settings)


@pytest.fixture(scope="session")
def cubic1d(fast_settings):
    return _problem("cubic1d", fast_settings)


@pytest.fixture(scope="session")
def fold_btip(fast_settings):
    return _problem("fold-btip", fast_settings)


@pytest.fixture(scope="session")
def planar(fast_settings):
    return _problem("planar-excitable", fast_settings)
