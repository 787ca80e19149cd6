import numpy as np
import pytest

from satjam import scenario

ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config.stash[ACCEPTANCE] = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of the acceptance criterion named by the test's marker."""
    number, title = request.node.get_closest_marker("criterion").args
    results = request.config.stash[ACCEPTANCE]

    def record(ok, detail):
        results[number] = (title, bool(ok), detail)
        return bool(ok)

    yield record
    results.setdefault(number, (title, False, "raised before reaching a verdict"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok, detail = results[number]
        terminalreporter.write_line(f"criterion {number:>2}  {'PASS' if ok else 'FAIL'}  {title}: {detail}")


@pytest.fixture(scope="session")
def cfg():
    return scenario.reference_config()


@pytest.fixture(scope="session")
def orbit(cfg):
    return scenario.orbit_params(cfg)


@pytest.fixture(scope="session")
def link(cfg):
    return scenario.comms_params(cfg)


@pytest.fixture(scope="session")
def problems(cfg):
    return scenario.build_problems(cfg)


@pytest.fixture(scope="session")
def report(cfg):
    return scenario.run_mission(cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
