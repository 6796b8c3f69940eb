import pytest

from qgx.qfield import PoleError, eval_at
from qgx.suites import SUITES, Config, Session, classical_limit, run_suite


def test_config_validation():
    for bad in ({"n": 0}, {"degree": 0}, {"grade_cap": 4}, {"fuel": 0}, {"output_format": "xml"}):
        with pytest.raises(ValueError):
            Config(**bad)


def test_fuel_default_from_environment(monkeypatch):
    monkeypatch.setenv("QGX_FUEL", "1234")
    assert Config().fuel == 1234


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nosuch", Session(Config(n=1)))


@pytest.mark.parametrize("name", SUITES)
def test_every_suite_passes_n1(name):
    res = run_suite(name, Session(Config(n=1)))
    assert res and all(r.passed for r in res), [r for r in res if not r.passed]


def test_classical_limit_parts(w2):
    res = {r.equation: r for r in classical_limit(w2.bundle, w2.engine, w2.constants)}
    assert res["sigma(1)^2 = 1"].passed
    assert res["lambda(1) = 0"].passed
    assert res["chi poles flagged"].passed
    assert res["(112) tail numerator at q=1"].passed
    # (1 - R R21)/lambda tends to -P at q = 1, so the full tail does not vanish there
    tail = res["(112) tail at q=1"]
    assert not tail.passed and tail.witness == "entry (1,1;1,1) -> -1"


def test_chi_has_a_pole_at_q1(w2):
    with pytest.raises(PoleError):
        for c in w2.fam.chi[0].terms.values():
            eval_at(c, 1)


def test_grade_cap_one_skips_higher_checks():
    res = run_suite("cartan", Session(Config(n=1, grade_cap=1)))
    assert all(r.passed for r in res), [r for r in res if not r.passed]
