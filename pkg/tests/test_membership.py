from itertools import product

import pytest
from hypothesis import given, settings

from helpers import P, horn_horn_formulas
from setcsp import membership
from setcsp.catalog import EXAMPLES, dj_forms, example, relation
from setcsp.config import CapExceeded
from setcsp.formula import falsified_clause
from setcsp.membership import (
    Counterexample,
    InternalInconsistency,
    check_membership,
    finite_e,
    finite_ei,
    finite_i,
    search_ei_counterexample,
)
from setcsp.reduction import ReductionOutcome

A, B, C = 1, 2, 4  # atoms as bits


def test_finite_i_examples():
    assert finite_i(A, 0, 1) == 1
    assert finite_i(1, 1, 1) == 3
    assert finite_i(3, 3, 2) == 15
    assert finite_i(0, 0, 2) == 0


def test_finite_e_examples():
    assert finite_e(A, 2) == 1 << A
    assert finite_e(0, 2) == 0
    assert finite_e(3, 2) == 0b1111
    # over three atoms: g({a}) | g({b}) < g({a,b}) < g(A)
    ga, gb, gab = finite_e(A, 3), finite_e(B, 3), finite_e(A | B, 3)
    assert ga | gb == (1 << A) | (1 << B)
    assert gab == (1 << A) | (1 << B) | (1 << (A | B))
    assert finite_e(7, 3) == (1 << 8) - 1


def _proper_subset(a, b):
    return a & ~b == 0 and a != b


@pytest.mark.parametrize("m", [1, 2])
def test_finite_e_laws(m):
    size = 1 << m
    full, top = size - 1, (1 << size) - 1
    images = [finite_e(x, m) for x in range(size)]
    assert len(set(images)) == size
    assert images[0] == 0 and images[full] == top
    for x, y in product(range(size), repeat=2):
        assert finite_e(x & y, m) == images[x] & images[y]
        z = x | y
        if x & ~y and y & ~x:
            assert _proper_subset(images[x] | images[y], images[z])


@pytest.mark.parametrize("m", [1, 2])
def test_forgets_unions(m):
    size = 1 << m
    full, top = size - 1, (1 << size) - 1
    for k in range(0, 3):
        for l in range(0, 3):
            for xs in product(range(size), repeat=k):
                for ys in product(range(size), repeat=l):
                    neg = 0
                    neg_img = 0
                    for y in ys:
                        neg |= full & ~y
                        neg_img |= top & ~finite_e(y, m)
                    lhs = neg_img
                    for x in xs:
                        lhs |= finite_e(x, m)
                    if k == 0:
                        assert (lhs == top) == (neg == full)
                    else:
                        assert (lhs == top) == any((x | neg) == full for x in xs)


@pytest.mark.parametrize("m", [1, 2])
def test_finite_i_is_isomorphism(m):
    full, big = (1 << m) - 1, (1 << 2 * m) - 1
    pairs = list(product(range(1 << m), repeat=2))
    assert sorted(finite_i(u, v, m) for u, v in pairs) == list(range(1 << 2 * m))
    assert finite_i(0, 0, m) == 0 and finite_i(full, full, m) == big
    for (u1, v1), (u2, v2) in product(pairs, repeat=2):
        a, b = finite_i(u1, v1, m), finite_i(u2, v2, m)
        assert finite_i(u1 & u2, v1 & v2, m) == a & b
        assert finite_i(u1 | u2, v1 | v2, m) == a | b
        assert finite_i(full & ~u1, full & ~v1, m) == big & ~a


def test_finite_ei_composes():
    assert finite_ei(1, 0, 1) == finite_e(1, 2)


def _manual(phi, u, v, m=1):
    w = tuple(finite_ei(a, b, m) for a, b in zip(u, v))
    ids = [x.id for x in phi.vars]
    bad = falsified_clause(phi, dict(zip(ids, w)), (1 << (1 << 2 * m)) - 1)
    assert bad is not None
    return Counterexample(phi, m, u, v, w, bad)


def test_cover_counterexample():
    phi = example("Cover").formula()
    cx = search_ei_counterexample(phi)
    assert (cx.u, cx.v) == ((0, 1), (1, 0))
    assert cx.replay()
    assert _manual(phi, (1, 0), (0, 1)).replay()


def test_eq_or_eq_counterexample():
    phi = example("EqOrEq").formula()
    cx = search_ei_counterexample(phi)
    assert (cx.u, cx.v) == ((0, 0, 1), (0, 1, 1))
    assert cx.replay()
    spec_pair = _manual(phi, (0, 0, 1), (1, 0, 0))
    assert spec_pair.replay()
    # the violation already shows up after the disjoint union step
    i_img = tuple(finite_i(a, b, 1) for a, b in zip(spec_pair.u, spec_pair.v))
    ids = [x.id for x in phi.vars]
    assert falsified_clause(phi, dict(zip(ids, i_img)), 3) is not None


def test_tampered_counterexample_fails_replay():
    cx = search_ei_counterexample(example("Cover").formula())
    assert not Counterexample(cx.phi, cx.m, cx.u, cx.u, cx.w, cx.clause).replay()
    assert not Counterexample(cx.phi, cx.m, cx.u, cx.v, cx.w, cx.clause + 1).replay()


def test_report_lists_every_variable():
    cx = search_ei_counterexample(example("Cover").formula())
    text = cx.report()
    assert "x:" in text and "y:" in text and "clause" in text


def test_disjointness_has_no_counterexample():
    phi = P("~x | ~y == 1")
    assert search_ei_counterexample(phi, 1) is None
    assert search_ei_counterexample(phi, 2) is None


def test_search_budget():
    with pytest.raises(CapExceeded):
        search_ei_counterexample(P("a == b and c == d"), m=2, budget=100)
    with pytest.raises(ValueError):
        search_ei_counterexample(P("a == b"), m=0)


@given(horn_horn_formulas(n=3))
@settings(max_examples=200)
def test_horn_horn_formulas_survive_ei(phi):
    assert search_ei_counterexample(phi, 1) is None


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_examples_classified(name):
    verdict = check_membership(example(name))
    assert verdict.member == EXAMPLES[name][1]
    if verdict.member:
        assert verdict.template is not None and "IN" in verdict.report()
    else:
        assert verdict.template is None and verdict.reduction.offending_clause is not None


@pytest.mark.parametrize("text", sorted(dj_forms(3).values()))
def test_dj_forms_are_in(text):
    assert check_membership(relation(text)).label == "IN"


def test_out_verdict_also_has_counterexample():
    for name in ("Cover", "EqOrEq", "Union"):
        assert search_ei_counterexample(example(name).formula()) is not None


def test_guard_contradiction_raises(monkeypatch):
    rdef = example("Cover")
    real = membership.reduce_relation

    def fake(r, cap=None):
        out = real(r, cap=cap)
        return ReductionOutcome(out.name, True, out.reduced, out.log, None)

    monkeypatch.setattr(membership, "reduce_relation", fake)
    with pytest.raises(InternalInconsistency):
        check_membership(rdef)
