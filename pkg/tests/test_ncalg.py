import pytest
from hypothesis import given
from hypothesis import strategies as st

from qgx.dsl import parse_expr
from qgx.ncalg import (
    FAMILY_LABELS,
    FuelExhausted,
    NCElem,
    build_rules,
    check_overlaps,
    code,
    coaction_check,
    decode,
    normal_form,
    quantum_lie_check,
    relations_vanish,
)
from qgx.qfield import LAMBDA, Q


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 3), st.integers(0, n - 1), st.integers(0, n - 1))))
def test_code_decode_round_trip(args):
    n, rank, i, j = args
    assert decode(code("TWYJ"[rank] if rank != 2 else "Y", i, j, n), n) == (rank, i, j)


def _nf(w, text):
    return normal_form(parse_expr(text, w.n), w.y_rules)


def test_quantum_matrix_relations_n2(w2):
    # the textbook GL_q(2) relations for a, b, c, d = t11, t12, t21, t22
    a, b, c, d = (parse_expr(s, 2) for s in ("t[1,1]", "t[1,2]", "t[2,1]", "t[2,2]"))
    zero = [
        a * b - (b * a).scale(Q),
        a * c - (c * a).scale(Q),
        b * d - (d * b).scale(Q),
        c * d - (d * c).scale(Q),
        b * c - c * b,
        a * d - d * a - (b * c).scale(LAMBDA),
    ]
    for e in zero:
        assert normal_form(e, w2.y_rules).is_zero()


def test_n1_relations(w1):
    assert _nf(w1, "w[1,1]*w[1,1]").is_zero()
    t, om = parse_expr("t[1,1]", 1), parse_expr("w[1,1]", 1)
    lhs = normal_form(om * t, w1.y_rules)
    assert lhs == normal_form(t * om, w1.y_rules).scale(Q**-2)


letters_n2 = st.sampled_from([code(f, i, j, 2) for f in "TWYJ" for i in range(2) for j in range(2)])


@given(st.lists(letters_n2, min_size=1, max_size=4).map(tuple))
def test_normal_form_is_idempotent_and_strategy_free(w2, word):
    e = NCElem({word: Q**0})
    nf = normal_form(e, w2.y_rules)
    assert normal_form(nf, w2.y_rules) == nf
    for strategy in ("leftmost", "rightmost"):
        assert normal_form(e, w2.y_rules, strategy=strategy) == nf


@given(st.lists(letters_n2, min_size=1, max_size=3).map(tuple), st.lists(letters_n2, min_size=1, max_size=2).map(tuple))
def test_normal_form_respects_multiplication(w2, u, v):
    r = w2.y_rules
    U, V = NCElem({u: Q**0}), NCElem({v: Q**0})
    assert normal_form(normal_form(U, r) * normal_form(V, r), r) == normal_form(U * V, r)


def test_unknown_strategy(w2):
    with pytest.raises(ValueError):
        normal_form(parse_expr("t[1,1]", 2), w2.y_rules, strategy="random")


def test_bad_middle(w2):
    with pytest.raises(ValueError):
        build_rules(w2.bundle, "Z")


def test_fuel_exhaustion_reports_limit(w2):
    rules = build_rules(w2.bundle, "Y", fuel=3)
    with pytest.raises(FuelExhausted) as exc:
        normal_form(parse_expr("t[2,2]*t[2,1]*t[1,2]*t[1,1]", 2), rules)
    assert exc.value.steps == 3 and "3 steps" in str(exc.value)


def test_all_families_present(w2):
    assert set(w2.y_rules.families) == set(FAMILY_LABELS)
    assert "(116)" in w2.x_rules.families and "(113)" not in w2.x_rules.families


@pytest.mark.parametrize("middle", ["Y", "X"])
def test_relations_vanish_and_overlaps_resolve(w, middle):
    rules = w.y_rules if middle == "Y" else w.x_rules
    for r in relations_vanish(rules) + check_overlaps(rules, 3):
        assert r.passed, r


def test_ascending_order_everywhere_is_not_confluent(w2):
    # the default keeps Y/X and J descending; making every family ascending breaks confluence
    rules = build_rules(w2.bundle, "Y", order={0: "asc", 1: "asc", 2: "asc", 3: "asc"})
    failed = [r for r in check_overlaps(rules, 3) if not r.passed]
    assert failed and all(r.witness for r in failed)


def test_quantum_lie_equivalence(w):
    res = quantum_lie_check(w.bundle, w.y_rules, w.x_rules)
    assert res and all(r.passed for r in res), res


def test_coactions_n1(w1):
    res = coaction_check(w1.y_rules, w1.bundle, w1.engine, 3)
    assert res and all(r.passed for r in res), res
