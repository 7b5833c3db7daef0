"""Shared test utilities: an enumeration-based ground truth and formula strategies."""

from itertools import product

from hypothesis import strategies as st

from setcsp.formula import (
    And,
    Atom,
    ClausalFormula,
    FConst,
    Lit,
    Not,
    Or,
    OuterLiteral,
    TConst,
    TJoin,
    TMeet,
    TNot,
    TVar,
    Var,
    holds,
    inner_clause,
    make_term,
    normalize_clause_set,
    outer_clause,
)
from setcsp.parser import parse_clausal

P = parse_clausal


def direct_models(phi: ClausalFormula, points: int):
    """Every assignment of subsets of a ``points``-element set that satisfies ``phi``."""
    ids = [v.id for v in phi.vars]
    full = (1 << points) - 1
    for vals in product(range(1 << points), repeat=len(ids)):
        if holds(phi, dict(zip(ids, vals)), full):
            yield vals


def direct_sat(phi: ClausalFormula, points: int | None = None) -> bool:
    """Satisfiability by enumeration over a finite powerset.

    With ``2^n`` points every nonempty-region pattern of ``n`` variables is
    realizable, so the answer matches satisfiability over infinite sets.
    """
    if points is None:
        points = 1 << len(phi.vars)
    return next(direct_models(phi, points), None) is not None


def formula_over(names, clauses) -> ClausalFormula:
    """Build a clausal formula from nested Python data.

    ``clauses`` is a list of clauses; a clause is a list of ``(term, positive)``;
    a term is a list of inner clauses; an inner clause is a string like ``"~x y"``.
    """
    index = {n: i for i, n in enumerate(names)}

    def ic(s):
        return inner_clause(Lit(index[t.lstrip("~")], not t.startswith("~")) for t in s.split())

    out = []
    for c in clauses:
        out.append(outer_clause(OuterLiteral(make_term(ic(s) for s in term), pos) for term, pos in c))
    return ClausalFormula(tuple(out), tuple(Var(i, n) for i, n in enumerate(names)))


# --------------------------------------------------------------------------
# strategies

NAMES = ("x", "y", "z", "u")


def term_trees(names=NAMES[:3], depth=3):
    leaves = st.one_of(st.sampled_from(names).map(TVar), st.sampled_from([0, 1]).map(TConst))
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            inner.map(TNot),
            st.lists(inner, min_size=2, max_size=3).map(lambda a: TMeet(tuple(a))),
            st.lists(inner, min_size=2, max_size=3).map(lambda a: TJoin(tuple(a))),
        ),
        max_leaves=6,
    )


def surface_formulas(names=NAMES[:3]):
    atoms = st.builds(Atom, term_trees(names), term_trees(names), st.booleans())
    leaves = st.one_of(atoms, st.booleans().map(FConst))
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            inner.map(Not),
            st.lists(inner, min_size=2, max_size=3).map(lambda a: And(tuple(a))),
            st.lists(inner, min_size=2, max_size=3).map(lambda a: Or(tuple(a))),
        ),
        max_leaves=5,
    )


def inner_clauses(n, horn=False):
    lits = st.lists(st.tuples(st.integers(0, n - 1), st.booleans()), max_size=3)

    def build(ls):
        c = {}
        for v, pos in ls:
            c.setdefault(v, pos)
        clause = [Lit(v, p) for v, p in c.items()]
        if horn:
            seen = False
            fixed = []
            for l in clause:
                if l.positive and seen:
                    l = Lit(l.var, False)
                seen |= l.positive
                fixed.append(l)
            clause = fixed
        return inner_clause(clause)

    return lits.map(build)


@st.composite
def horn_horn_formulas(draw, n=3, all_inner_horn=False, max_clauses=4):
    clauses = []
    for _ in range(draw(st.integers(0, max_clauses))):
        lits = []
        if draw(st.booleans()):
            term = draw(st.lists(inner_clauses(n, horn=True), min_size=1, max_size=2))
            lits.append(OuterLiteral(make_term(term), True))
        for _ in range(draw(st.integers(0, 2))):
            term = draw(st.lists(inner_clauses(n, horn=all_inner_horn), min_size=1, max_size=2))
            lits.append(OuterLiteral(make_term(term), False))
        clauses.append(outer_clause(lits))
    phi = ClausalFormula(tuple(clauses), tuple(Var(i, NAMES[i]) for i in range(n)))
    return normalize_clause_set(phi)


@st.composite
def clausal_formulas(draw, n=3, max_clauses=3):
    """Arbitrary (not necessarily Horn) clausal formulas."""
    clauses = []
    for _ in range(draw(st.integers(0, max_clauses))):
        lits = []
        for _ in range(draw(st.integers(0, 2))):
            term = draw(st.lists(inner_clauses(n), min_size=1, max_size=2))
            lits.append(OuterLiteral(make_term(term), draw(st.booleans())))
        clauses.append(outer_clause(lits))
    phi = ClausalFormula(tuple(clauses), tuple(Var(i, NAMES[i]) for i in range(n)))
    return normalize_clause_set(phi)
