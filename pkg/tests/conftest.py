import itertools
from pathlib import Path

import numpy as np
import pytest

from jsmac.infotheory import ChannelSpec, InputPolicy, bound_table, joint_distribution

SPECS = Path(__file__).resolve().parent.parent / "specs"

_criteria = []
_setup_time = {}


def xor_and_pair(z_fun=lambda a, b: a & b):
    """K=2, identity prefixes, uniform bits, Y = V1 xor V2, Z = z_fun(V1, V2)."""
    w = np.zeros((2, 2, 2, 2))
    for x1, x2 in itertools.product(range(2), repeat=2):
        w[x1, x2, x1 ^ x2, z_fun(x1, x2)] = 1.0
    eye = np.eye(2)
    policy = InputPolicy(np.array([1.0]), (np.full((1, 2), 0.5),) * 2, (eye, eye))
    return ChannelSpec(w, 2), policy


@pytest.fixture(scope="session")
def xor_and_joint():
    return joint_distribution(*xor_and_pair())


@pytest.fixture(scope="session")
def xor_and_table(xor_and_joint):
    return bound_table(xor_and_joint)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def spec_dir():
    return SPECS


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "setup":
        _setup_time[item.nodeid] = rep.duration
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        number, text = marker.args
        # module fixtures do real work for some criteria, so count their setup too
        duration = rep.duration + (_setup_time.get(item.nodeid, 0.0) if rep.when == "call" else 0.0)
        _criteria.append((number, "PASS" if rep.passed else "FAIL", text, duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, verdict, text, duration in sorted(_criteria, key=lambda c: c[0]):
        terminalreporter.write_line(f"[{verdict}] criterion {number}: {text} ({duration:.2f}s)")
