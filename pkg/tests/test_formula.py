import itertools

from hypothesis import given, strategies as st

from helpers import P, clausal_formulas, direct_models, formula_over, surface_formulas
from setcsp.formula import (
    And,
    Atom,
    ClausalFormula,
    FConst,
    Lit,
    Not,
    ONE,
    Or,
    TConst,
    TJoin,
    TMeet,
    TNot,
    TVar,
    Var,
    classify_horn,
    desugar_atom,
    formula_vars,
    holds,
    normalize_clause_set,
    rename_clause,
    substitute,
    to_clausal,
    to_inner_cnf,
)
from setcsp.oracle import MintermPattern, eval_pattern, oracle_equiv, pattern_to_block_model
from setcsp.parser import parse_formula

x, y, z = TVar("x"), TVar("y"), TVar("z")


def eval_term_tree(t, env, full):
    if isinstance(t, TVar):
        return env[t.name]
    if isinstance(t, TConst):
        return full if t.value else 0
    if isinstance(t, TNot):
        return full & ~eval_term_tree(t.arg, env, full)
    vals = [eval_term_tree(a, env, full) for a in t.args]
    acc = full if isinstance(t, TMeet) else 0
    for v in vals:
        acc = acc & v if isinstance(t, TMeet) else acc | v
    return acc


def eval_surface(f, env, full):
    """Direct semantics of a surface formula over a finite powerset."""
    if isinstance(f, Atom):
        same = eval_term_tree(f.lhs, env, full) == eval_term_tree(f.rhs, env, full)
        return same == f.equal
    if isinstance(f, FConst):
        return f.value
    if isinstance(f, Not):
        return not eval_surface(f.arg, env, full)
    vals = [eval_surface(a, env, full) for a in f.args]
    return all(vals) if isinstance(f, And) else any(vals)


def agrees_on_all_patterns(surface, clausal: ClausalFormula) -> bool:
    n = len(clausal.vars)
    for mask in range(1, 1 << (1 << n)):
        b = MintermPattern.from_mask(n, mask)
        m = pattern_to_block_model(b, clausal.vars)
        env = {v.name: m.values[v.name] for v in clausal.vars}
        if eval_surface(surface, env, (1 << m.s) - 1) != eval_pattern(clausal, b):
            return False
    return True


# desugar_atom


def test_desugar_keeps_atoms_against_one():
    a = Atom(x, ONE, True)
    assert desugar_atom(a) == a


def test_desugar_equality_and_disequality():
    for equal in (True, False):
        d = desugar_atom(Atom(x, y, equal))
        assert d.rhs == ONE and d.equal == equal
        assert d.lhs == TMeet((TJoin((TNot(x), y)), TJoin((TNot(y), x))))
        phi = to_clausal(d, ("x", "y"))
        # the desugared atom holds exactly when the two sets are (un)equal
        models = set(direct_models(phi, 3))
        expected = {(a, b) for a in range(8) for b in range(8) if (a == b) == equal}
        assert models == expected


# to_inner_cnf


def test_inner_cnf_de_morgan():
    term = to_inner_cnf(TNot(TMeet((x, y))), {"x": 0, "y": 1})
    assert term == ((Lit(0, False), Lit(1, False)),)


def test_inner_cnf_distributes_join_over_meet():
    tree = TJoin((TMeet((x, y)), z))
    term = to_inner_cnf(tree, {"x": 0, "y": 1, "z": 2})
    assert term == ((Lit(0, True), Lit(2, True)), (Lit(1, True), Lit(2, True)))
    phi = to_clausal(Atom(tree, ONE, True), ("x", "y", "z"))
    assert agrees_on_all_patterns(Atom(tree, ONE, True), phi)


def test_inner_cnf_of_one_is_empty():
    assert to_inner_cnf(TConst(1), {}) == ()
    assert to_inner_cnf(TConst(0), {}) == ((),)


# to_clausal


def test_conjunction_gives_two_unit_clauses():
    phi = to_clausal(parse_formula("(x == 1) and (y != 1)"))
    assert len(phi.clauses) == 2
    assert all(len(c) == 1 for c in phi.clauses)
    assert [c[0].positive for c in phi.clauses] == [True, False]


def test_not_flips_polarity():
    phi = to_clausal(parse_formula("not (x != 1)"))
    assert phi.clauses == ((((((Lit(0, True),),), True)),),)


def test_disjunction_of_equalities_gives_two_positive_literals():
    f = parse_formula("(x == y) or (u == 1)")
    phi = to_clausal(f)
    assert len(phi.clauses) == 1
    assert [l.positive for l in phi.clauses[0]] == [True, True]
    assert agrees_on_all_patterns(f, phi)


def test_var_order_is_first_occurrence():
    phi = to_clausal(parse_formula("z == 1 or ~x | z == 1 and y != 0"))
    assert phi.names == ("z", "x", "y")
    phi = to_clausal(parse_formula("z == 1"), ("a", "z"))
    assert phi.names == ("a", "z")


@given(surface_formulas(("x", "y", "z")))
def test_to_clausal_preserves_meaning(f):
    phi = to_clausal(f, ("x", "y", "z"))
    assert agrees_on_all_patterns(f, phi)
    assert oracle_equiv(phi, normalize_clause_set(phi))


@given(surface_formulas(("x", "y", "z", "u")))
def test_to_clausal_preserves_meaning_four_vars(f):
    phi = to_clausal(f, ("x", "y", "z", "u"))
    # spot-check a fixed spread of patterns; the 3-variable test is exhaustive
    n = 4
    for mask in range(1, 1 << 16, 997):
        b = MintermPattern.from_mask(n, mask)
        m = pattern_to_block_model(b, phi.vars)
        env = {v.name: m.values[v.name] for v in phi.vars}
        assert eval_surface(f, env, (1 << m.s) - 1) == eval_pattern(phi, b)


# normalize_clause_set


def test_normalize_drops_tautological_inner_clause():
    phi = formula_over(["x", "y"], [[(["x ~x y", "y"], True)]])
    assert normalize_clause_set(phi) == formula_over(["x", "y"], [[(["y"], True)]])


def test_normalize_drops_duplicate_clause():
    c = [(["~x y"], True)]
    phi = formula_over(["x", "y"], [c, c])
    assert len(phi.clauses) == 2
    assert len(normalize_clause_set(phi).clauses) == 1


def test_duplicate_literals_collapse():
    phi = formula_over(["x"], [[(["x x"], True)]])
    assert phi.clauses[0][0].term == ((Lit(0, True),),)


def test_normalize_term_one_cases():
    pos = formula_over(["x"], [[(["x ~x"], True), (["x"], False)]])
    assert normalize_clause_set(pos).clauses == ()
    neg = formula_over(["x"], [[(["x ~x"], False), (["x"], True)]])
    assert normalize_clause_set(neg) == formula_over(["x"], [[(["x"], True)]])


@given(clausal_formulas())
def test_normalize_idempotent_and_equivalent(phi):
    once = normalize_clause_set(phi)
    assert normalize_clause_set(once) == once
    assert oracle_equiv(phi, once)


# classify_horn


def test_disjointness_is_horn_horn():
    assert classify_horn(P("~x | ~y == 1")).horn_horn


def test_union_cover_is_not_positive_inner_horn():
    r = classify_horn(P("(x|y) == 1"))
    assert not r.positive_inner_horn and not r.horn_horn


def test_two_positive_literals_not_outer_horn():
    r = classify_horn(P("x == 1 or y == 1"))
    assert not r.outer_horn and r.positive_inner_horn


def test_negative_non_horn_inner_clause_still_horn_horn():
    r = classify_horn(P("(x|y) != 1 or ~x|z == 1"))
    assert r.horn_horn and not r.all_inner_horn


@given(clausal_formulas(), st.permutations(range(3)))
def test_horn_classification_stable_under_renaming(phi, perm):
    mapping = dict(enumerate(perm))
    clauses = tuple(c for c in (rename_clause(c, mapping) for c in phi.clauses) if c is not None)
    renamed = ClausalFormula(clauses, phi.vars)
    assert classify_horn(renamed) == classify_horn(phi)


# substitute

SUB = P("~x | y == 1")
DISJ = P("~x | ~y == 1")


def test_substitute_subset():
    a, b = Var(0, "a"), Var(1, "b")
    assert substitute(SUB, [a, b]) == formula_over(["a", "b"], [[(["~a b"], True)]])


def test_substitute_repeated_argument_tautology():
    a = Var(0, "a")
    assert substitute(SUB, [a, a]).clauses == ()


def test_substitute_disjoint_repeated_forces_empty():
    a = Var(0, "a")
    phi = substitute(DISJ, [a, a])
    assert phi == formula_over(["a"], [[(["~a"], True)]])
    assert set(direct_models(phi, 2)) == {(0,)}


def test_substitute_arity_mismatch():
    import pytest

    with pytest.raises(ValueError, match="arity"):
        substitute(SUB, [Var(0, "a")])


@given(clausal_formulas(), st.lists(st.integers(0, 3), min_size=3, max_size=3))
def test_substitute_composes_assignments(phi, args):
    ctx = tuple(Var(i, n) for i, n in enumerate("abcd"))
    inst = substitute(phi, [ctx[i] for i in args], ctx)
    full = 3
    for vals in itertools.product(range(4), repeat=4):
        composed = {p.id: vals[a] for p, a in zip(phi.vars, args)}
        assert holds(inst, dict(enumerate(vals)), full) == holds(phi, composed, full)


def test_formula_vars_order():
    assert formula_vars(parse_formula("y == x or z != y")) == ["y", "x", "z"]
