import pytest

from conftest import FIXTURES
from qgx.rtensor import IndexedTensor
from qgx.suites import Config, Session, run_suite

MUTANTS = sorted(p.name for p in FIXTURES.glob("r_*.json"))


def test_three_mutants_shipped():
    assert len(MUTANTS) == 3


@pytest.fixture(scope="module", params=MUTANTS)
def session(request):
    return Session(Config(n=2, r_file=str(FIXTURES / request.param)))


def test_mutant_differs_from_standard_in_one_entry(session):
    from qgx.rtensor import build_r

    std = build_r(2)
    keys = set(std.entries) | set(session.R.entries)
    assert sum(std[k] != session.R[k] for k in keys) == 1


@pytest.mark.parametrize("suite", ["ybe", "hecke", "woronowicz", "overlaps"])
def test_mutant_fails_with_witness(session, suite):
    res = run_suite(suite, session)
    failed = [r for r in res if not r.passed]
    assert failed, f"{suite} did not notice the corruption"
    assert all(r.witness for r in failed)


def test_fixture_files_parse():
    for name in MUTANTS:
        t = IndexedTensor.from_json((FIXTURES / name).read_text())
        assert t.n == 2 and t.legs == 4
