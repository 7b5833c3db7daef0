"""Positive unit resolution on inner clauses.

``inner_res`` decides whether ``meet(clauses) == 1`` is satisfiable over the
powerset algebra for inner Horn clause sets.  It is the classic linear-time
counter scheme: every clause keeps the number of negative literals whose
variable has not been propagated yet, and a clause whose counter reaches zero
either becomes a positive unit (its variable is queued) or is empty (reject).

``HornClosure`` is the same propagation kept alive across calls, so outer
resolution can grow its clause set and ask entailment questions against it
without starting over.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .formula import InnerClause, Lit


@dataclass
class InnerResult:
    accepted: bool
    model: dict[int, int] | None = None
    trace: list[int] = field(default_factory=list)
    empty_clause: int | None = None

    def __bool__(self) -> bool:
        return self.accepted


def inner_res(clauses: Sequence[InnerClause], variables: Iterable[int] = ()) -> InnerResult:
    """Run positive unit resolution.

    On acceptance the model maps propagated variables to 1 and every other
    variable (of the clauses, plus ``variables``) to 0; for Horn input it
    satisfies every clause.  On rejection ``trace`` is the propagation
    sequence and ``empty_clause`` the index of the clause that ran empty.
    Rejection is sound for arbitrary clauses.
    """
    counter = []
    positives = []
    occ_pos: dict[int, list[int]] = defaultdict(list)
    occ_neg: dict[int, list[int]] = defaultdict(list)
    queue: deque[int] = deque()
    trace: list[int] = []
    all_vars = set(variables)
    for i, clause in enumerate(clauses):
        pos = []
        neg = 0
        for v, positive in clause:
            all_vars.add(v)
            if positive:
                pos.append(v)
                occ_pos[v].append(i)
            else:
                neg += 1
                occ_neg[v].append(i)
        counter.append(neg)
        positives.append(pos)
        if neg == 0:
            if not pos:
                return InnerResult(False, trace=trace, empty_clause=i)
            if len(pos) == 1:
                queue.append(pos[0])
    removed = [False] * len(clauses)
    done: set[int] = set()
    while queue:
        x = queue.popleft()
        if x in done:
            continue
        done.add(x)
        trace.append(x)
        for i in occ_pos.get(x, ()):
            removed[i] = True
        for i in occ_neg.get(x, ()):
            if removed[i]:
                continue
            counter[i] -= 1
            if counter[i] == 0:
                pos = positives[i]
                if not pos:
                    return InnerResult(False, trace=trace, empty_clause=i)
                if len(pos) == 1:
                    queue.append(pos[0])
    model = {v: int(v in done) for v in sorted(all_vars)}
    return InnerResult(True, model=model, trace=trace)


def query_units(query: InnerClause) -> list[InnerClause]:
    """Unit clauses asserting that ``query`` evaluates to 0: ``~x`` for each ``x``, ``y`` for each ``~y``."""
    return [(Lit(v, not positive),) for v, positive in query]


def entails_clause(psi: Sequence[InnerClause], query: InnerClause) -> bool:
    """Does ``meet(psi) == 1`` imply ``join(query) == 1`` over the powerset algebra?"""
    return not inner_res(list(psi) + query_units(query)).accepted


class HornClosure:
    """Incrementally maintained least model of a growing set of inner Horn clauses.

    ``forced`` is the set of variables every model maps to 1.  Adding a clause
    costs time proportional to its length plus the propagation it triggers,
    so building up a clause set costs linear time in total.
    """

    def __init__(self):
        self.forced: set[int] = set()
        self.body: list[tuple[int, ...]] = []
        self.head: list[int | None] = []
        self.count: list[int] = []
        self.occ: dict[int, list[int]] = defaultdict(list)
        self.conflict = False

    def add(self, clause: InnerClause) -> list[int]:
        """Add an inner Horn clause; returns the variables newly forced to 1."""
        heads = [l.var for l in clause if l.positive]
        if len(heads) > 1:
            raise ValueError("HornClosure only accepts inner Horn clauses")
        head = heads[0] if heads else None
        body = tuple(l.var for l in clause if not l.positive)
        if head is not None and head in body:
            return []
        c = len(self.body)
        self.body.append(body)
        self.head.append(head)
        forced = self.forced
        self.count.append(sum(1 for v in body if v not in forced))
        for v in body:
            self.occ[v].append(c)
        if self.count[c] == 0:
            return self._fire(c)
        return []

    def _fire(self, c: int) -> list[int]:
        new: list[int] = []
        pending = [c]
        forced, count, occ, head = self.forced, self.count, self.occ, self.head
        while pending:
            h = head[pending.pop()]
            if h is None:
                self.conflict = True
                return new
            if h in forced:
                continue
            forced.add(h)
            new.append(h)
            for d in occ.get(h, ()):
                count[d] -= 1
                if count[d] == 0:
                    pending.append(d)
        return new

    def reach(self, starts: Iterable[int], targets: frozenset[int] | set[int] = frozenset()):
        """Propagate ``starts`` on top of the forced set without changing it.

        Returns ``(hit, reached)``: ``hit`` is True when propagation reaches a
        variable in ``targets`` (or one already forced) or an all-negative
        clause; ``reached`` holds the variables derived beyond ``forced``.
        """
        forced, count, occ, head = self.forced, self.count, self.occ, self.head
        if self.conflict or any(t in forced for t in targets):
            return True, set()
        reached = {v for v in starts if v not in forced}
        queue = list(reached)
        local: dict[int, int] = {}
        while queue:
            v = queue.pop()
            if v in targets:
                return True, reached
            for d in occ.get(v, ()):
                k = local.get(d, count[d]) - 1
                local[d] = k
                if k == 0:
                    h = head[d]
                    if h is None:
                        return True, reached
                    if h not in forced and h not in reached:
                        reached.add(h)
                        queue.append(h)
        return False, reached

    def entails(self, query: InnerClause):
        """Entailment test for ``join(query) == 1``; same return shape as ``reach``."""
        targets = {v for v, positive in query if positive}
        starts = [v for v, positive in query if not positive]
        return self.reach(starts, targets)
