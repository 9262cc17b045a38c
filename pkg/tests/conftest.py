import numpy as np
import pytest

from kcwalk import _walk_py

try:
    from kcwalk import _walk_core
except ImportError:  # extension not built
    _walk_core = None

KERNELS = [pytest.param(_walk_py.propagate, id="python")]
if _walk_core is not None:
    KERNELS.append(pytest.param(_walk_core.propagate, id="cython"))

_outcome = pytest.StashKey[str]()


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): exit criterion reported in the terminal summary")


@pytest.fixture(params=KERNELS)
def kernel(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    if rep.when == "call" or rep.failed:
        item.stash[_outcome] = rep.outcome
    return rep


def pytest_collection_modifyitems(session, config, items):
    config._acceptance_items = [i for i in items if i.get_closest_marker("acceptance")]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    items = getattr(config, "_acceptance_items", [])
    if not items:
        return
    terminalreporter.section("acceptance criteria")
    for item in items:
        outcome = item.stash.get(_outcome, "not run")
        status = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"[{status}] {item.get_closest_marker('acceptance').args[0]}")
