import numpy as np
import pytest

from negishi import CRRA, Economy, LogUtility, StateSpace

_criteria = {}


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    ok = report.passed if report.when == "call" else not report.failed
    prev = _criteria.get(number, (title, True))
    _criteria[number] = (title, prev[1] and ok)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report.criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")


def two_state_log():
    """Log agents owning one state each; equilibrium weights are (1/2, 1/2)."""
    space = StateSpace(["s1", "s2"], [1.0, 1.0])
    return Economy(space, [LogUtility(), LogUtility()], [[2.0, 0.0], [0.0, 4.0]])


def random_economy(rng, n_agents, n_states, gammas=None, scaled=True, sparse=True):
    """Random economy with CRRA / log agents and strictly positive totals."""
    space = StateSpace([f"s{i}" for i in range(n_states)], rng.uniform(0.2, 2.0, n_states))
    fields = []
    for m in range(n_agents):
        g = gammas[m] if gammas is not None else rng.choice([0.5, 1.0, 2.0, 3.5])
        scale = rng.uniform(0.5, 2.0, n_states) if scaled else None
        fields.append(LogUtility(scale) if g == 1.0 else CRRA(g, scale))
    init = rng.uniform(0.1, 3.0, (n_agents, n_states))
    if sparse:
        init *= rng.uniform(size=init.shape) < 0.7
        for m in range(n_agents):
            if not np.any(init[m] > 0):
                init[m, rng.integers(n_states)] = 1.0
        for s in range(n_states):
            if not np.any(init[:, s] > 0):
                init[rng.integers(n_agents), s] = 0.5
    return Economy(space, fields, init)


@pytest.fixture
def log_economy():
    return two_state_log()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
