"""Compile relation definitions into Horn-Horn templates.

Pipeline per relation: clausal form, normalization, ``inner_hornify`` (split
non-Horn inner clauses), ``strongly_reduce`` (drop outer literals while the
formula stays equivalent), then a Horn check.  A result that is still not
outer Horn certifies that the relation is not in EI.

``inner_hornify`` keeps the satisfying *core* assignments (pointwise images
under the union-forgetting embedding ``e``) but is not an equivalence.  For a
formula whose inner clauses are all Horn, ``e`` preserves every literal in
both directions and is injective, so two such formulas have the same core
models exactly when they are equivalent; that is why strong reduction can be
checked with the plain equivalence oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .config import CapExceeded, oracle_cap
from .formula import (
    ClausalFormula,
    CspInstance,
    InnerClause,
    Lit,
    OuterLiteral,
    RelationDef,
    _normalize_clause,
    classify_horn,
    is_inner_horn,
    normalize_clause_set,
)
from .oracle import BlockModel, oracle_equiv


@dataclass(frozen=True)
class RewriteStep:
    kind: str  # split-positive | split-clause | remove-literal
    clause: int
    literal: int
    positives: tuple[int, ...] = ()  # split inner clause, parameter ids
    negatives: tuple[int, ...] = ()

    def describe(self, names=None) -> str:
        if self.kind == "remove-literal":
            return f"{self.kind} clause={self.clause} literal={self.literal}"
        show = (lambda v: names[v]) if names else str
        inner = " | ".join([show(v) for v in self.positives] + ["~" + show(v) for v in self.negatives])
        return f"{self.kind} clause={self.clause} literal={self.literal} inner=({inner})"


@dataclass(frozen=True)
class Template:
    """A Horn-Horn clause set standing in for a relation definition."""

    name: str
    formula: ClausalFormula
    log: tuple[RewriteStep, ...] = ()
    strongly_reduced: bool = True

    @property
    def arity(self) -> int:
        return len(self.formula.vars)


@dataclass(frozen=True)
class ReductionOutcome:
    name: str
    horn_horn: bool
    reduced: ClausalFormula
    log: tuple[RewriteStep, ...]
    offending_clause: int | None = None
    template: Template | None = None

    @property
    def kind(self) -> str:
        return "HORN_HORN" if self.horn_horn else "NOT_OUTER_HORN"


class NotInEI(Exception):
    def __init__(self, outcome: ReductionOutcome):
        self.outcome = outcome
        super().__init__(
            f"relation {outcome.name} does not reduce to Horn-Horn form "
            f"(clause {outcome.offending_clause} keeps two positive literals)"
        )


def _first_non_horn(clauses):
    for i, clause in enumerate(clauses):
        for j, lit in enumerate(clause):
            for c in lit.term:
                if not is_inner_horn(c):
                    return i, j, c
    return None


def _split(term, c: InnerClause):
    rest = [d for d in term if d != c]
    neg = [l for l in c if not l.positive]
    return [tuple(rest) + (tuple(sorted([l] + neg)),) for l in c if l.positive]


def inner_hornify(phi: ClausalFormula) -> tuple[ClausalFormula, list[RewriteStep]]:
    """Split non-Horn inner clauses until every inner clause is Horn.

    A positive literal ``t == 1`` with ``c = x1|..|xk|~Y`` in ``t`` becomes the
    disjunction of ``t_i == 1`` (``c`` replaced by ``x_i|~Y``); an outer clause
    holding ``t != 1`` is replaced by ``k`` copies, one per ``t_i != 1``.
    Always the first non-Horn inner clause (clause, literal, inner order) is
    split.  Returns the rewritten formula and the steps taken.
    """
    clauses = list(normalize_clause_set(phi).clauses)
    log: list[RewriteStep] = []
    while (hit := _first_non_horn(clauses)) is not None:
        i, j, c = hit
        lit = clauses[i][j]
        step = (
            tuple(l.var for l in c if l.positive),
            tuple(l.var for l in c if not l.positive),
        )
        others = clauses[i][:j] + clauses[i][j + 1:]
        parts = _split(lit.term, c)
        if lit.positive:
            log.append(RewriteStep("split-positive", i, j, *step))
            new = _normalize_clause(others + tuple(OuterLiteral(t, True) for t in parts))
            clauses[i:i + 1] = [] if new is None else [new]
        else:
            log.append(RewriteStep("split-clause", i, j, *step))
            repl = []
            for t in parts:
                new = _normalize_clause(others + (OuterLiteral(t, False),))
                if new is not None:
                    repl.append(new)
            clauses[i:i + 1] = repl
    out = normalize_clause_set(ClausalFormula(tuple(clauses), phi.vars))
    return out, log


def _drop_literal(phi: ClausalFormula, i: int, j: int) -> ClausalFormula:
    clauses = list(phi.clauses)
    clauses[i] = clauses[i][:j] + clauses[i][j + 1:]
    return normalize_clause_set(ClausalFormula(tuple(clauses), phi.vars))


def strongly_reduce(
    phi: ClausalFormula, cap: int | None = None
) -> tuple[ClausalFormula, list[RewriteStep]]:
    """Greedily drop outer literals whose removal keeps ``phi`` equivalent.

    Candidates are tried in (clause, literal) order, restarting after every
    removal, until no single removal is equivalence preserving.
    """
    if not classify_horn(phi).all_inner_horn:
        raise ValueError("strong reduction expects every inner clause to be Horn")
    limit = oracle_cap(cap)
    if len(phi.vars) > limit:
        raise CapExceeded(f"{len(phi.vars)} variables exceed the oracle cap {limit}")
    phi = normalize_clause_set(phi)
    log: list[RewriteStep] = []
    changed = True
    while changed:
        changed = False
        for i, clause in enumerate(phi.clauses):
            for j in range(len(clause)):
                cand = _drop_literal(phi, i, j)
                if oracle_equiv(phi, cand, cap=limit):
                    log.append(RewriteStep("remove-literal", i, j))
                    phi = cand
                    changed = True
                    break
            if changed:
                break
    return phi, log


def _offending(phi: ClausalFormula) -> int | None:
    for i, clause in enumerate(phi.clauses):
        if sum(1 for l in clause if l.positive) > 1:
            return i
    return None


def reduce_relation(rdef: RelationDef, cap: int | None = None) -> ReductionOutcome:
    """Run the template pipeline on one relation definition.

    Arities above the oracle cap are only accepted when splitting alone
    already yields an outer-Horn formula; strong reduction is then skipped,
    since it can only remove literals and the verdict is already settled.
    """
    phi = rdef.formula()
    hornified, log = inner_hornify(phi)
    limit = oracle_cap(cap)
    reduced_ok = True
    if len(phi.vars) > limit:
        if _offending(hornified) is not None:
            raise CapExceeded(
                f"relation {rdef.name} has arity {len(phi.vars)} above the oracle cap {limit}"
            )
        reduced, reduced_ok = hornified, False
    else:
        reduced, more = strongly_reduce(hornified, cap=limit)
        log = log + more
    report = classify_horn(reduced)
    if not report.outer_horn:
        return ReductionOutcome(rdef.name, False, reduced, tuple(log), _offending(reduced))
    assert report.horn_horn and report.all_inner_horn
    tmpl = Template(rdef.name, reduced, tuple(log), reduced_ok)
    return ReductionOutcome(rdef.name, True, reduced, tuple(log), None, tmpl)


def reduce_language(defs: Mapping[str, RelationDef], cap: int | None = None) -> dict[str, Template]:
    """Templates for every definition, or ``NotInEI`` for the first failure (name order)."""
    out = {}
    for name in sorted(defs):
        res = reduce_relation(defs[name], cap=cap)
        if not res.horn_horn:
            raise NotInEI(res)
        out[name] = res.template
    return out


def lift_to_definitions(
    model: BlockModel, inst: CspInstance, templates: Mapping[str, Template]
) -> BlockModel:
    """Turn a model of the compiled templates into a model of the original definitions.

    Splitting inner clauses of negative literals loses information: the
    template may only require ``x_i|~Y != 1`` for each ``i`` where the
    definition needs ``x_1|..|x_k|~Y != 1``.  The model is re-encoded over a
    family ``Z`` of nonempty sets of old blocks: all singletons (an exact
    copy of the model) plus, for every such split whose parts all fail, one set
    ``{a_1..a_k}`` with ``a_i`` a block inside every ``Y`` but outside ``x_i``.
    Variable ``x`` gets new block ``z`` iff ``z`` lies inside ``x``.  This map
    keeps every inner Horn literal's truth value (it meets, keeps 0 and 1, and
    singletons witness every failed inclusion), and the extra sets make each
    split disequality hold as a whole.
    """
    s = model.s
    full = (1 << s) - 1
    vals = [model.values[v.name] for v in inst.vars]
    family = [1 << j for j in range(s)]
    seen = set(family)
    for con in inst.constraints:
        tmpl = templates[con.relation]
        for step in tmpl.log:
            if step.kind != "split-clause":
                continue
            inside = full
            for p in step.negatives:
                inside &= vals[con.args[p]]
            z = 0
            for p in step.positives:
                gap = inside & ~vals[con.args[p]]
                if not gap:
                    z = 0
                    break
                z |= gap & -gap
            if z and z not in seen:
                seen.add(z)
                family.append(z)
    if len(family) == s:
        return model
    values = {}
    for v, val in zip(inst.vars, vals):
        values[v.name] = sum(1 << k for k, z in enumerate(family) if z & ~val == 0)
    return BlockModel(len(family), values)
