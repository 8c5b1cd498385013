import numpy as np
import pytest

from rotsym.geometry import RotSymManifold
from rotsym.profiles import deep_well_profile, schwarzschild_profile

# one (criterion, passed, detail) line per acceptance test, printed at the end
ACCEPTANCE = {}


def record(criterion, passed, detail=""):
    ACCEPTANCE[criterion] = (bool(passed), detail)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when != "call":
        return
    key = marker.args[0]
    passed, detail = ACCEPTANCE.get(key, (rep.passed, ""))
    if not rep.passed:
        passed = False
        detail = detail or str(rep.longrepr).strip().splitlines()[-1]
    ACCEPTANCE[key] = (passed, detail)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0])):
        passed, detail = ACCEPTANCE[key]
        tr.write_line(f"{'PASS' if passed else 'FAIL'}  {key}" + (f"  -- {detail}" if detail else ""))


A0 = 16 * np.pi  # r0 = 2 in three dimensions
A1 = 64 * np.pi  # r = 4


@pytest.fixture(scope="session")
def sch3():
    return RotSymManifold(schwarzschild_profile(3, 1.0))


@pytest.fixture(scope="session")
def well3():
    return RotSymManifold(deep_well_profile(3, A0, A1, 10.0, 0.05))
