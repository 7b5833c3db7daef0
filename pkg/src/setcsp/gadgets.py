"""3SAT to CSP({U, I, Neq}) reduction with model transfer in both directions.

``U(x,y,z)`` is ``x | y == z``, ``I(x,y,z)`` is ``x & y == z`` and
``Neq(x,y)`` is ``x != y``.  Each boolean variable ``x`` becomes a pair
``x_t, x_f`` of complementary sets between ``f`` and ``t``; each clause gets a
helper ``u_C`` holding the union of its first two literal sets, and the union
of ``u_C`` with the third literal set must reach ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .formula import (
    Atom,
    Constraint,
    CspInstance,
    RelationDef,
    TJoin,
    TMeet,
    TVar,
    Var,
    compile_instance,
)
from .oracle import BlockModel, eval_block_model

_x, _y, _z = TVar("x"), TVar("y"), TVar("z")

BUILTINS: dict[str, RelationDef] = {
    "U": RelationDef("U", ("x", "y", "z"), Atom(TJoin((_x, _y)), _z, True), builtin=True),
    "I": RelationDef("I", ("x", "y", "z"), Atom(TMeet((_x, _y)), _z, True), builtin=True),
    "Neq": RelationDef("Neq", ("x", "y"), Atom(_x, _y, False), builtin=True),
}


@dataclass(frozen=True)
class Cnf3:
    """A 3SAT instance: DIMACS-style literals (``+i`` / ``-i``, variables ``1..n``)."""

    n: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        for c in self.clauses:
            if len(c) != 3:
                raise ValueError(f"clause {c} does not have exactly 3 literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.n:
                    raise ValueError(f"literal {lit} out of range for {self.n} variables")

    def satisfied_by(self, alpha: Mapping[int, bool]) -> bool:
        return all(any(alpha[abs(l)] == (l > 0) for l in c) for c in self.clauses)

    def models(self):
        """All satisfying assignments, in binary counting order."""
        for bits in range(1 << self.n):
            alpha = {i + 1: bool(bits >> i & 1) for i in range(self.n)}
            if self.satisfied_by(alpha):
                yield alpha

    def satisfiable(self) -> bool:
        return next(self.models(), None) is not None


@dataclass(frozen=True)
class GadgetInstance:
    cnf: Cnf3
    instance: CspInstance
    pairs: dict[int, tuple[int, int]] = field(hash=False)  # boolean var -> (x_t, x_f) indices
    helpers: tuple[int, ...] = ()  # clause index -> u_C index
    t: int = 0
    f: int = 1

    def literal_var(self, lit: int) -> int:
        xt, xf = self.pairs[abs(lit)]
        return xt if lit > 0 else xf


def gadget_from_3sat(cnf: Cnf3) -> GadgetInstance:
    names = ["t", "f"]
    pairs = {}
    for i in range(1, cnf.n + 1):
        pairs[i] = (len(names), len(names) + 1)
        names += [f"x{i}_t", f"x{i}_f"]
    helpers = []
    for j in range(len(cnf.clauses)):
        helpers.append(len(names))
        names.append(f"u{j}")
    t, f = 0, 1
    cons = []
    for i in range(1, cnf.n + 1):
        xt, xf = pairs[i]
        cons.append(Constraint("U", (xt, xf, t)))
        cons.append(Constraint("I", (xt, xf, f)))

    def lv(lit):
        xt, xf = pairs[abs(lit)]
        return xt if lit > 0 else xf

    for j, (l1, l2, l3) in enumerate(cnf.clauses):
        u = helpers[j]
        cons.append(Constraint("U", (lv(l1), lv(l2), u)))
        cons.append(Constraint("U", (u, lv(l3), t)))
    cons.append(Constraint("Neq", (t, f)))
    cons.append(Constraint("I", (t, f, f)))
    inst = CspInstance(
        dict(BUILTINS), tuple(Var(k, name) for k, name in enumerate(names)), tuple(cons)
    )
    return GadgetInstance(cnf, inst, pairs, tuple(helpers), t, f)


def lift_boolean_model(g: GadgetInstance, alpha: Mapping[int, bool]) -> BlockModel:
    """One-block model: ``t`` is the block, ``f`` is empty, literals follow ``alpha``."""
    if not g.cnf.satisfied_by(alpha):
        raise ValueError("assignment does not satisfy the 3SAT instance")
    vals = [0] * len(g.instance.vars)
    vals[g.t] = 1
    for i, (xt, xf) in g.pairs.items():
        vals[xt] = int(bool(alpha[i]))
        vals[xf] = 1 - vals[xt]
    for j, (l1, l2, _) in enumerate(g.cnf.clauses):
        vals[g.helpers[j]] = int(alpha[abs(l1)] == (l1 > 0) or alpha[abs(l2)] == (l2 > 0))
    model = BlockModel(1, {v.name: vals[v.id] for v in g.instance.vars})
    if not eval_block_model(compile_instance(g.instance), model):
        raise AssertionError("lifted model fails the gadget")
    return model


def extract_boolean_model(g: GadgetInstance, beta: BlockModel) -> dict[int, bool]:
    """Read a boolean assignment off any gadget model at a block inside ``t`` but not ``f``."""
    if not eval_block_model(compile_instance(g.instance), beta):
        raise ValueError("block model does not satisfy the gadget")
    names = [v.name for v in g.instance.vars]
    gap = beta.values[names[g.t]] & ~beta.values[names[g.f]]
    a = (gap & -gap).bit_length() - 1
    alpha = {i: bool(beta.values[names[xt]] >> a & 1) for i, (xt, _) in g.pairs.items()}
    if not g.cnf.satisfied_by(alpha):
        raise AssertionError("extracted assignment fails the 3SAT instance")
    return alpha


def gadget_text(g: GadgetInstance) -> str:
    from .parser import render

    return render(g.instance)


def all_small_cnfs(max_vars: int, max_clauses: int) -> list[Cnf3]:
    """Every 3SAT instance up to the given size, clauses as sorted literal triples.

    Clauses are taken as multisets of literals and formulas as multisets of
    clauses, which removes only literal-order and clause-order symmetry.
    """
    from itertools import combinations_with_replacement

    out = []
    for n in range(0, max_vars + 1):
        lits = [l for i in range(1, n + 1) for l in (i, -i)]
        triples = list(combinations_with_replacement(sorted(lits, key=lambda l: (abs(l), l < 0)), 3))
        for k in range(0, max_clauses + 1):
            for cl in combinations_with_replacement(triples, k):
                out.append(Cnf3(n, tuple(cl)))
    return out
