import numpy as np
import pytest

from lpplab import kernels

IMPLS = ["compiled", "python"] if kernels.have_compiled() else ["python"]

_criteria = {}


@pytest.fixture(params=IMPLS)
def impl(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion(request, capsys):
    """Record (and print straight away) the one-line verdict of an acceptance item."""
    key = request.node.get_closest_marker("acceptance").args[0]
    _criteria[key] = ("FAIL", "did not finish")

    def record(ok, detail):
        _criteria[key] = ("PASS" if ok else "FAIL", detail)
        with capsys.disabled():
            print(f"\n{key}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(key): one acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda k: int(k[1:])):
        verdict, detail = _criteria[key]
        terminalreporter.write_line(f"{key}: {verdict}  {detail}")
