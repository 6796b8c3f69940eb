import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from qgx.hopfpair import PairingEngine
from qgx.ncalg import build_rules
from qgx.rtensor import RBundle, derive_constants
from qgx.wcalc import FormCalculus

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


class World:
    """Everything built from the standard R-matrix for one n, created once per test run."""

    def __init__(self, n):
        self.n = n
        self.bundle = RBundle.standard(n)
        self.engine = PairingEngine(self.bundle)
        self.fam = self.engine.functionals()
        self.constants = derive_constants(self.bundle, self.engine)
        self._y = self._x = self._forms = None

    @property
    def y_rules(self):
        if self._y is None:
            self._y = build_rules(self.bundle, "Y")
        return self._y

    @property
    def x_rules(self):
        if self._x is None:
            self._x = build_rules(self.bundle, "X")
        return self._x

    @property
    def forms(self):
        if self._forms is None:
            self._forms = FormCalculus(self.bundle, self.y_rules, self.engine, self.constants)
        return self._forms


_WORLDS = {}


def world(n):
    if n not in _WORLDS:
        _WORLDS[n] = World(n)
    return _WORLDS[n]


@pytest.fixture(scope="session")
def w1():
    return world(1)


@pytest.fixture(scope="session")
def w2():
    return world(2)


@pytest.fixture(params=[1, 2], ids=["n1", "n2"], scope="session")
def w(request):
    return world(request.param)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
