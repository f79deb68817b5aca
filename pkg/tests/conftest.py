import time

import pytest
from hypothesis import settings

from polyaut.forge import construct
from polyaut.permgroup import from_cycles

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")

_CACHE = {}


def timed_construction(name, group_factory, **kw):
    """Build once per session; later calls reuse the result and the first wall time."""
    if name not in _CACHE:
        t0 = time.perf_counter()
        c = construct(group_factory(), **kw)
        _CACHE[name] = (c, time.perf_counter() - t0)
    return _CACHE[name]


def v4():
    return from_cycles(4, "(1 2)(3 4)", "(1 3)(2 4)")


def a4():
    return from_cycles(4, "(1 2 3)", "(2 3 4)")


@pytest.fixture(scope="session")
def v4_run():
    return timed_construction("v4", v4, force_general=True, jobs=1)


@pytest.fixture(scope="session")
def a4_run():
    return timed_construction("a4", a4, jobs=2)


# -- acceptance summary ---------------------------------------------------------

CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = "PASS" if rep.outcome == "passed" else "FAIL"
        prev = CRITERIA.get(n)
        if prev is None or prev[1] == "PASS":
            CRITERIA[n] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        title, status = CRITERIA[n]
        terminalreporter.write_line(f"[{status}] criterion {n}: {title}")
