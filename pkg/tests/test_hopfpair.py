import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qgx.hopfpair import (
    AElem,
    DualElem,
    DualLetter,
    antipode,
    verify_functional_relations,
    verify_tilded_functionals,
    verify_woronowicz,
)
from qgx.qfield import ONE, ZERO

# -- brute-force pairing oracle -------------------------------------------------------------
# Single letters against t come straight from R and the Hecke relation, without any inverse:
#   <l+, t> = R12,  <l-, t> = R21^-1 = R12 - lambda P,  <S(l+), t> = R12^-1 = R21 - lambda P,
#   <S(l-), t> = R21.
# Longer words use the coproduct of t and of the dual letters directly.


def _letter_on_t(R, lam, sign, power, a, c, i, j):
    r12 = R[(i, a, j, c)]
    r21 = R[(a, i, c, j)]
    p = ONE if (i == c and a == j) else ZERO
    if power == 0:
        return r12 if sign == "+" else r12 - lam * p
    return r21 - lam * p if sign == "+" else r21


def _letter_on_word(R, lam, n, sign, power, a, c, tword):
    if not tword:
        return ONE if a == c else ZERO
    (i, j), rest = tword[0], tword[1:]
    acc = ZERO
    for b in range(n):
        if power == 0:  # Delta l^a_c = l^a_b (x) l^b_c
            first = _letter_on_t(R, lam, sign, power, a, b, i, j)
            if not first.is_zero():
                acc += first * _letter_on_word(R, lam, n, sign, power, b, c, rest)
        else:  # Delta S(l^a_c) = S(l^b_c) (x) S(l^a_b)
            first = _letter_on_t(R, lam, sign, power, b, c, i, j)
            if not first.is_zero():
                acc += first * _letter_on_word(R, lam, n, sign, power, a, b, rest)
    return acc


def oracle_pair(bundle, dword, tword):
    R, lam, n = bundle.R, bundle.lam, bundle.n
    if not dword:
        return ONE if all(i == j for i, j in tword) else ZERO
    head, tail = dword[0], dword[1:]
    acc = ZERO
    # Delta of the t-word: choose a middle index for every letter
    for mids in itertools.product(range(n), repeat=len(tword)):
        left = tuple((i, m) for (i, _), m in zip(tword, mids))
        right = tuple((m, j) for (_, j), m in zip(tword, mids))
        v = _letter_on_word(R, lam, n, head.sign, head.power, head.row, head.col, left)
        if not v.is_zero():
            acc += v * oracle_pair(bundle, tail, right)
    return acc


def _t_word(tword):
    e = AElem.unit()
    for i, j in tword:
        e = e * AElem.t(i, j)
    return e


dual_letters = st.builds(
    DualLetter, st.sampled_from("+-"), st.sampled_from([0, 1]), st.integers(0, 1), st.integers(0, 1)
)
t_words = st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), max_size=3).map(tuple)


@given(st.lists(dual_letters, max_size=2).map(tuple), t_words)
def test_pairing_matches_brute_force(w2, dword, tword):
    x = DualElem({dword: ONE})
    assert w2.engine.pair(x, _t_word(tword)) == oracle_pair(w2.bundle, dword, tword)


def test_pairing_n3_single_letters():
    from conftest import world

    w3 = world(3)
    for sign, power, a, c, i, j in itertools.product("+-", (0, 1), *[range(3)] * 4):
        x = DualElem.l(sign, a, c, power)
        assert w3.engine.pair(x, AElem.t(i, j)) == oracle_pair(w3.bundle, (DualLetter(sign, power, a, c),), ((i, j),))


def test_unit_pairs_as_counit(w2):
    assert w2.engine.pair(DualElem.unit(), AElem.t(0, 0) * AElem.t(1, 1)) == ONE
    assert w2.engine.pair(DualElem.unit(), AElem.t(0, 1)) == ZERO
    assert w2.engine.counit(DualElem.l("+", 0, 0)) == ONE


def test_antipode_axiom_on_letters(w):
    # sum_k <x, S(t^i_k) t^k_j> = eps(x) delta^i_j for every dual letter
    n = w.n
    for sign, power, a, c in itertools.product("+-", (0, 1), range(n), range(n)):
        x = DualElem.l(sign, a, c, power)
        for i, j in itertools.product(range(n), repeat=2):
            total = ZERO
            for k in range(n):
                total += w.engine.pair(x, AElem.t(i, k, 1) * AElem.t(k, j))
            want = w.engine.counit(x) if i == j else ZERO
            assert total == want


def test_squared_antipode_is_d_conjugation(w):
    # <x, S^2(t^i_j)> = D_i <x, t^i_j> D_j^-1 on every dual word of length <= 2
    n, b = w.n, w.bundle
    words = [()] + [(l,) for l in _all_letters(n)] + [(l, m) for l in _all_letters(n) for m in _all_letters(n)]
    for i, j in itertools.product(range(n), repeat=2):
        for dw in words:
            x = DualElem({dw: ONE})
            lhs = w.engine.pair(x, antipode(AElem.t(i, j), 2))
            assert lhs == b.d(i, i) * b.dinv(j, j) * w.engine.pair(x, AElem.t(i, j))


def _all_letters(n):
    return [DualLetter(s, 0, a, c) for s in "+-" for a in range(n) for c in range(n)]


def test_chi_normalization(w):
    # <chi_(a,b), t^k_l> = delta^k_a delta^b_l and chi annihilates the unit
    n = w.n
    for A, (k, l) in itertools.product(range(n * n), itertools.product(range(n), repeat=2)):
        a, b = divmod(A, n)
        want = ONE if (k, l) == (a, b) else ZERO
        assert w.engine.pair(w.fam.chi[A], AElem.t(k, l)) == want
        assert w.engine.counit(w.fam.chi[A]) == ZERO


def test_f_counit(w):
    N = w.n**2
    for I, J in itertools.product(range(N), repeat=2):
        assert w.engine.counit(w.fam.f[I][J]) == (ONE if I == J else ZERO)


def test_functional_eq_finds_witness(w2):
    ok, wit = w2.engine.functional_eq(DualElem.l("+", 0, 0), DualElem.l("-", 0, 0), 1)
    assert not ok and "t[1,1]" in wit


def test_degree_must_be_positive(w2):
    with pytest.raises(ValueError):
        w2.engine.functional_eq(DualElem.unit(), DualElem.unit(), 0)


@pytest.mark.parametrize("n", [1, 2])
def test_woronowicz_conditions(n):
    from conftest import world

    res = verify_woronowicz(world(n).engine, 3)
    assert [r.equation for r in res] == ["(23)", "(24)", "(25)", "(26)", "(27)", "(28)"]
    assert all(r.passed and r.witness is None for r in res), [r for r in res if not r.passed]


def test_functional_relations(w):
    res = verify_functional_relations(w.engine, w.constants, 3)
    assert res and all(r.passed for r in res), [r for r in res if not r.passed]


def test_tilded_functionals(w):
    res = verify_tilded_functionals(w.engine, 3)
    assert res and all(r.passed for r in res), [r for r in res if not r.passed]
