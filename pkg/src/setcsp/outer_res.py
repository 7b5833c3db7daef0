"""Two-level resolution for Horn-Horn clause sets, with model construction.

The procedure works on a normalized Horn-Horn clausal formula.  Psi is the set
of inner clauses of the positive unit clauses.  An inner clause ``D`` of a
negative literal ``t != 1`` is dropped once Psi entails ``D == 1``; a negative
literal with no inner clauses left is dropped from its outer clause; a clause
that shrinks to its positive literal joins Psi.  The formula is rejected when
an outer clause runs empty or Psi itself is unsatisfiable, and accepted at the
fixpoint.

Every removal keeps the formula equivalent, and entailment is monotone in Psi,
so the final state does not depend on the order of removals.  ``outer_res``
runs in passes with Psi frozen during a pass.  In the default mode an inner
clause is re-tested in a later pass only if a clause added to Psi since its
last test could fire inside the set of variables that test derived; every
other re-test would repeat a negative answer.  ``naive=True`` re-tests every
surviving inner clause with a fresh ``inner_res`` call each pass; both modes
perform the same removals in the same order.

On acceptance, each surviving inner clause ``D_j`` of a surviving negative
literal yields a two-valued model ``alpha_j`` of Psi that falsifies ``D_j``;
block ``j`` of the witness contains the variables ``alpha_j`` maps to 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .formula import (
    ClausalFormula,
    CspInstance,
    InnerClause,
    classify_horn,
    compile_instance,
    normalize_clause_set,
)
from .inner_res import HornClosure, entails_clause, inner_res, query_units
from .oracle import BlockModel, eval_block_model


class NotHornHorn(ValueError):
    pass


class InternalError(RuntimeError):
    pass


@dataclass(frozen=True)
class TraceEvent:
    kind: str  # remove-inner | remove-literal | psi-reject | empty-clause
    pass_no: int
    clause: int | None = None
    literal: int | None = None
    inner: InnerClause | None = None


@dataclass
class Stats:
    iterations: int = 0
    inner_res_calls: int = 0
    inner_clauses_removed: int = 0
    literals_removed: int = 0
    retests_skipped: int = 0


@dataclass
class SolveOutcome:
    sat: bool
    formula: ClausalFormula
    model: BlockModel | None = None
    trace: list[TraceEvent] = field(default_factory=list)
    stats: Stats = field(default_factory=Stats)

    def __bool__(self) -> bool:
        return self.sat


class _State:
    """Mutable solver view of a normalized Horn-Horn formula."""

    def __init__(self, phi: ClausalFormula):
        self.positive: list = []  # term of the positive literal, or None
        self.negatives: list[dict[int, list[InnerClause]]] = []  # literal index -> live inner clauses
        for clause in phi.clauses:
            pos = None
            neg = {}
            for j, (term, positive) in enumerate(clause):
                if positive:
                    pos = term
                else:
                    neg[j] = list(term)
            self.positive.append(pos)
            self.negatives.append(neg)

    def is_positive_unit(self, ci: int) -> bool:
        return self.positive[ci] is not None and not self.negatives[ci]

    def is_empty(self, ci: int) -> bool:
        return self.positive[ci] is None and not self.negatives[ci]

    def psi(self) -> list[InnerClause]:
        return [c for ci, t in enumerate(self.positive) if t is not None and not self.negatives[ci] for c in t]

    def live_keys(self):
        for ci, neg in enumerate(self.negatives):
            for j, inner in neg.items():
                for d in inner:
                    yield (ci, j, d)


def _names(phi: ClausalFormula) -> dict[int, str]:
    return {v.id: v.name for v in phi.vars}


def _block_model(phi: ClausalFormula, alphas: list[set[int]], base: set[int]) -> BlockModel:
    names = _names(phi)
    if not alphas:
        return BlockModel(1, {names[v.id]: int(v.id in base) for v in phi.vars})
    masks = {v.id: 0 for v in phi.vars}
    for j, alpha in enumerate(alphas):
        bit = 1 << j
        for v in alpha:
            masks[v] |= bit
    return BlockModel(len(alphas), {names[v]: m for v, m in masks.items()})


def outer_res(phi: ClausalFormula, *, naive: bool = False) -> SolveOutcome:
    """Decide satisfiability of a Horn-Horn clause set over the powerset algebra."""
    phi = normalize_clause_set(phi)
    if not classify_horn(phi).horn_horn:
        raise NotHornHorn("outer resolution needs a Horn-Horn clause set")
    if naive:
        return _outer_res_naive(phi)
    return _outer_res_fast(phi)


def _outer_res_naive(phi: ClausalFormula) -> SolveOutcome:
    st = _State(phi)
    stats = Stats()
    trace: list[TraceEvent] = []
    out = SolveOutcome(False, phi, trace=trace, stats=stats)
    for ci in range(len(phi.clauses)):
        if st.is_empty(ci):
            trace.append(TraceEvent("empty-clause", 0, ci))
            return out
    repeat = True
    while repeat:
        repeat = False
        stats.iterations += 1
        p = stats.iterations
        psi = st.psi()
        stats.inner_res_calls += 1
        if not inner_res(psi):
            trace.append(TraceEvent("psi-reject", p))
            return out
        for ci, neg in enumerate(st.negatives):
            for j in sorted(neg):
                inner = neg[j]
                for d in list(inner):
                    stats.inner_res_calls += 1
                    if entails_clause(psi, d):
                        inner.remove(d)
                        stats.inner_clauses_removed += 1
                        trace.append(TraceEvent("remove-inner", p, ci, j, d))
                if not inner:
                    del neg[j]
                    stats.literals_removed += 1
                    trace.append(TraceEvent("remove-literal", p, ci, j))
                    repeat = True
                    if st.is_empty(ci):
                        trace.append(TraceEvent("empty-clause", p, ci))
                        return out
    psi = st.psi()
    alphas = []
    for _, _, d in st.live_keys():
        res = inner_res(psi + query_units(d))
        stats.inner_res_calls += 1
        alphas.append({v for v, val in res.model.items() if val})
    base = {v for v, val in inner_res(psi).model.items() if val}
    out.sat = True
    out.model = _block_model(phi, alphas, base)
    return out


def _outer_res_fast(phi: ClausalFormula) -> SolveOutcome:
    st = _State(phi)
    stats = Stats()
    trace: list[TraceEvent] = []
    out = SolveOutcome(False, phi, trace=trace, stats=stats)
    engine = HornClosure()
    for ci in range(len(phi.clauses)):
        if st.is_empty(ci):
            trace.append(TraceEvent("empty-clause", 0, ci))
            return out
    for ci in range(len(phi.clauses)):
        if st.is_positive_unit(ci):
            for c in st.positive[ci]:
                engine.add(c)
                if engine.conflict:
                    trace.append(TraceEvent("psi-reject", 1))
                    return out

    # watch[v]: keys whose last failed test derived v; xwatch[v]: keys with v positive
    reach: dict[tuple, set[int]] = {}
    watch: dict[int, set[tuple]] = {}
    xwatch: dict[int, set[tuple]] = {}
    alive: set[tuple] = set()
    for key in st.live_keys():
        alive.add(key)
        for v, positive in key[2]:
            if positive:
                xwatch.setdefault(v, set()).add(key)

    def unwatch(key):
        for v in reach.pop(key, ()):
            s = watch.get(v)
            if s is not None:
                s.discard(key)

    dirty = sorted(alive)
    total_live = len(alive)
    while dirty:
        stats.iterations += 1
        p = stats.iterations
        stats.retests_skipped += total_live - len(dirty)
        new_units = []
        for key in dirty:
            if key not in alive:
                continue
            ci, j, d = key
            stats.inner_res_calls += 1
            hit, derived = engine.entails(d)
            unwatch(key)
            if not hit:
                reach[key] = derived
                for v in derived:
                    watch.setdefault(v, set()).add(key)
                continue
            alive.discard(key)
            inner = st.negatives[ci][j]
            inner.remove(d)
            stats.inner_clauses_removed += 1
            trace.append(TraceEvent("remove-inner", p, ci, j, d))
            if inner:
                continue
            del st.negatives[ci][j]
            stats.literals_removed += 1
            trace.append(TraceEvent("remove-literal", p, ci, j))
            if st.is_empty(ci):
                trace.append(TraceEvent("empty-clause", p, ci))
                return out
            if st.is_positive_unit(ci):
                new_units.append(ci)
        total_live = len(alive)

        # grow Psi, then find the inner clauses whose entailment may have changed
        added: list[int] = []
        newly: list[int] = []
        for ci in new_units:
            for c in st.positive[ci]:
                before = len(engine.body)
                newly.extend(engine.add(c))
                if engine.conflict:
                    trace.append(TraceEvent("psi-reject", p + 1))
                    return out
                added.extend(range(before, len(engine.body)))
        marked: set[tuple] = set()
        for v in newly:
            marked |= xwatch.get(v, set()) & alive
        candidates = set(added)
        for v in newly:
            candidates.update(engine.occ.get(v, ()))
        forced = engine.forced
        for c in candidates:
            h = engine.head[c]
            if h is not None and h in forced:
                continue
            rest = [u for u in engine.body[c] if u not in forced]
            if not rest:
                continue
            pivot = min(rest, key=lambda u: len(watch.get(u, ())))
            for key in watch.get(pivot, ()):
                r = reach[key]
                if all(u in r for u in rest):
                    marked.add(key)
        dirty = sorted(marked & alive)

    alphas = []
    for key in sorted(alive):
        stats.inner_res_calls += 1
        hit, derived = engine.entails(key[2])
        if hit:
            raise InternalError("surviving inner clause turned out to be entailed")
        alphas.append(engine.forced | derived)
    out.sat = True
    out.model = _block_model(phi, alphas, engine.forced)
    return out


def replay_trace(phi: ClausalFormula, trace: list[TraceEvent]) -> bool:
    """Re-justify every step of a rejection trace with independent ``inner_res`` calls.

    Returns True when each removal is backed by an entailment from the
    positive unit clauses present at that point, and the trace ends in an
    empty clause or an unsatisfiable Psi.
    """
    phi = normalize_clause_set(phi)
    st = _State(phi)
    psi = None
    for ev in trace:
        if ev.kind != "psi-reject" and not (isinstance(ev.clause, int) and 0 <= ev.clause < len(st.negatives)):
            return False
        if ev.kind == "remove-inner":
            if psi is None:
                psi = st.psi()
            inner = st.negatives[ev.clause].get(ev.literal)
            if inner is None or ev.inner not in inner or not entails_clause(psi, ev.inner):
                return False
            inner.remove(ev.inner)
        elif ev.kind == "remove-literal":
            inner = st.negatives[ev.clause].get(ev.literal)
            if inner is None or inner:
                return False
            del st.negatives[ev.clause][ev.literal]
            if st.is_positive_unit(ev.clause):
                psi = None
        elif ev.kind == "empty-clause":
            return st.is_empty(ev.clause) and ev is trace[-1]
        elif ev.kind == "psi-reject":
            return (not inner_res(st.psi()).accepted) and ev is trace[-1]
        else:
            return False
    return False


def solve_instance(
    inst: CspInstance,
    templates: Mapping[str, object],
    *,
    raw: bool = False,
    naive: bool = False,
) -> SolveOutcome:
    """Compile an instance against Horn-Horn templates and run outer resolution.

    ``templates`` must come from ``reduce_language`` unless ``raw`` is set, in
    which case plain clausal formulas are accepted (and must be Horn-Horn).
    On SAT the model is lifted so that it also satisfies the original relation
    definitions, and checked against both the compiled clause set and the
    definitions before it is returned.
    """
    from .reduction import Template, lift_to_definitions

    plain: dict[str, ClausalFormula] = {}
    for name, t in templates.items():
        if isinstance(t, Template):
            plain[name] = t.formula
        elif raw and isinstance(t, ClausalFormula):
            plain[name] = t
        else:
            raise TypeError(
                f"template for {name!r} was not produced by the reduction pipeline; "
                "pass raw=True to solve hand-written Horn-Horn clauses"
            )
    compiled = compile_instance(inst, plain)
    outcome = outer_res(compiled, naive=naive)
    if outcome.sat:
        if not eval_block_model(compiled, outcome.model):
            raise InternalError("outer resolution produced a model that fails its own clause set")
        if not raw:
            outcome.model = lift_to_definitions(outcome.model, inst, templates)
            if not eval_block_model(compiled, outcome.model):
                raise InternalError("lifted model fails the compiled clause set")
            if not eval_block_model(compile_instance(inst), outcome.model):
                raise InternalError("lifted model fails the relation definitions")
    return outcome
