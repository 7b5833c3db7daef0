from collections import Counter

import pytest

from setcsp.formula import compile_instance
from setcsp.gadgets import (
    BUILTINS,
    Cnf3,
    all_small_cnfs,
    extract_boolean_model,
    gadget_from_3sat,
    gadget_text,
    lift_boolean_model,
)
from setcsp.oracle import BlockModel, brute_force_points, eval_block_model
from setcsp.parser import parse_instance

XXX = Cnf3(1, ((1, 1, 1),))


def test_single_clause_counts():
    g = gadget_from_3sat(XXX)
    assert [v.name for v in g.instance.vars] == ["t", "f", "x1_t", "x1_f", "u0"]
    assert len(g.instance.constraints) == 6


def test_three_variable_counts():
    g = gadget_from_3sat(Cnf3(3, ((1, -2, 3),)))
    assert len(g.instance.vars) == 9 and len(g.instance.constraints) == 10


def test_no_clauses():
    g = gadget_from_3sat(Cnf3(1, ()))
    kinds = Counter(c.relation for c in g.instance.constraints)
    assert kinds == Counter({"U": 1, "I": 2, "Neq": 1})
    assert brute_force_points(g.instance, 1) is not None


def test_constraint_multiset_matches_construction():
    cnf = Cnf3(2, ((1, -2, 2), (-1, -1, 2)))
    g = gadget_from_3sat(cnf)
    t, f = g.t, g.f
    x1t, x1f = g.pairs[1]
    x2t, x2f = g.pairs[2]
    u0, u1 = g.helpers
    want = [
        ("U", (x1t, x1f, t)), ("I", (x1t, x1f, f)),
        ("U", (x2t, x2f, t)), ("I", (x2t, x2f, f)),
        ("U", (x1t, x2f, u0)), ("U", (u0, x2t, t)),
        ("U", (x1f, x1f, u1)), ("U", (u1, x2t, t)),
        ("Neq", (t, f)), ("I", (t, f, f)),
    ]
    assert Counter((c.relation, c.args) for c in g.instance.constraints) == Counter(want)


def test_lift_true_assignment():
    g = gadget_from_3sat(XXX)
    beta = lift_boolean_model(g, {1: True})
    assert beta == BlockModel(1, {"t": 1, "f": 0, "x1_t": 1, "x1_f": 0, "u0": 1})
    assert eval_block_model(compile_instance(g.instance), beta)


def test_lift_rejects_unsatisfying_assignment():
    with pytest.raises(ValueError):
        lift_boolean_model(gadget_from_3sat(XXX), {1: False})


def test_lift_without_clauses():
    g = gadget_from_3sat(Cnf3(2, ()))
    beta = lift_boolean_model(g, {1: False, 2: True})
    assert beta.values == {"t": 1, "f": 0, "x1_t": 0, "x1_f": 1, "x2_t": 1, "x2_f": 0}


def test_extract_from_two_block_model():
    g = gadget_from_3sat(XXX)
    beta = BlockModel.from_sets(2, {"t": [0, 1], "f": [1], "x1_t": [0, 1], "x1_f": [1], "u0": [0, 1]})
    assert extract_boolean_model(g, beta) == {1: True}


def test_extract_skips_atoms_inside_f():
    # block 0 lies in t and f, so it carries no boolean information
    g = gadget_from_3sat(Cnf3(1, ()))
    beta = BlockModel.from_sets(2, {"t": [0, 1], "f": [0], "x1_t": [0], "x1_f": [0, 1]})
    assert eval_block_model(compile_instance(g.instance), beta)
    assert extract_boolean_model(g, beta) == {1: False}


def test_extract_rejects_non_model():
    g = gadget_from_3sat(XXX)
    with pytest.raises(ValueError):
        extract_boolean_model(g, BlockModel(1, {"t": 1, "f": 1, "x1_t": 1, "x1_f": 0, "u0": 1}))


def test_cnf_validation():
    with pytest.raises(ValueError):
        Cnf3(1, ((1, 2, 1),))
    with pytest.raises(ValueError):
        Cnf3(1, ((1, 1),))


def test_gadget_text_round_trips():
    g = gadget_from_3sat(Cnf3(2, ((1, -2, 2),)))
    text = gadget_text(g)
    assert text.splitlines()[0] == "builtin I Neq U"
    back = parse_instance(text)
    assert [v.name for v in back.vars] == [v.name for v in g.instance.vars]
    assert back.constraints == g.instance.constraints


def test_builtins_have_expected_arity():
    assert {n: d.arity for n, d in BUILTINS.items()} == {"U": 3, "I": 3, "Neq": 2}


def test_small_family_equivalence_and_round_trip():
    for cnf in all_small_cnfs(2, 2):
        g = gadget_from_3sat(cnf)
        beta = brute_force_points(g.instance, 1)
        assert (beta is not None) == cnf.satisfiable()
        if beta is not None:
            extract_boolean_model(g, beta)
        for alpha in cnf.models():
            assert extract_boolean_model(g, lift_boolean_model(g, alpha)) == alpha
