import numpy as np
import pytest

_ACCEPTANCE = {}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


class _Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.line = None

    def record(self, ok, detail):
        self.line = f"{'PASS' if ok else 'FAIL'}  criterion {self.number:>2} ({self.title}): {detail}"
        print(self.line)
        return ok


@pytest.fixture
def criterion(request):
    """Records the one-line verdict of an acceptance criterion."""
    marker = request.node.get_closest_marker("criterion")
    crit = _Criterion(*marker.args)
    yield crit
    _ACCEPTANCE[crit.number] = crit.line or f"FAIL  criterion {crit.number:>2} ({crit.title}): raised before reporting"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
