"""EI membership: the syntactic pipeline plus a finite counterexample search.

Finite analogs of the two operations, on subsets of a finite atom set encoded
as bitmasks:

* ``finite_i(u, v, m1)`` is the tagged disjoint union: atoms of ``u`` keep
  their index, atoms of ``v`` are shifted past the ``m1`` left atoms.  It is an
  isomorphism ``P(A1) x P(A2) -> P(A1 + A2)``.
* ``finite_e(x, m)`` sends ``x`` to the set of nonempty subsets of ``x``,
  except that the full set goes to everything (the empty subset included).
  Elements of ``P(P(A))`` are bitmasks over ``2^m`` positions, position ``z``
  standing for the subset of ``A`` with mask ``z``.  The map is injective,
  keeps meets, 0 and 1, and forgets unions.

A pair of finite models whose composite image falsifies the formula is a
sound proof that the relation is not preserved by ``ei``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .config import CapExceeded, Limits
from .formula import ClausalFormula, RelationDef, falsified_clause
from .reduction import ReductionOutcome, Template, reduce_relation


def finite_i(u: int, v: int, m1: int) -> int:
    return u | (v << m1)


def finite_e(x: int, m: int) -> int:
    size = 1 << m
    if x == size - 1:
        return (1 << size) - 1
    out = 0
    for z in range(1, size):
        if z & ~x == 0:
            out |= 1 << z
    return out


def finite_ei(u: int, v: int, m: int) -> int:
    """Composite on two copies of an ``m``-atom algebra; lives in ``P(P(2m atoms))``."""
    return finite_e(finite_i(u, v, m), 2 * m)


def _ids(phi: ClausalFormula):
    return [v.id for v in phi.vars]


@dataclass(frozen=True)
class Counterexample:
    phi: ClausalFormula
    m: int
    u: tuple[int, ...]
    v: tuple[int, ...]
    w: tuple[int, ...]
    clause: int

    def replay(self) -> bool:
        """Re-evaluate: ``u`` and ``v`` satisfy ``phi`` and ``w`` falsifies clause ``clause``."""
        ids = _ids(self.phi)
        small = (1 << self.m) - 1
        big = (1 << (1 << (2 * self.m))) - 1
        if falsified_clause(self.phi, dict(zip(ids, self.u)), small) is not None:
            return False
        if falsified_clause(self.phi, dict(zip(ids, self.v)), small) is not None:
            return False
        w = tuple(finite_ei(a, b, self.m) for a, b in zip(self.u, self.v))
        if w != self.w:
            return False
        return falsified_clause(self.phi, dict(zip(ids, w)), big) == self.clause

    def report(self) -> str:
        def atoms(mask: int, width: int) -> str:
            return "{" + ",".join(str(k) for k in range(width) if mask >> k & 1) + "}"

        m = self.m
        lines = [f"counterexample over {m} atom(s) per side"]
        for name, a, b, c in zip(self.phi.names, self.u, self.v, self.w):
            lines.append(
                f"  {name}: u={atoms(a, m)} v={atoms(b, m)} i={atoms(finite_i(a, b, m), 2 * m)} "
                f"ei={atoms(c, 1 << (2 * m))}"
            )
        lines.append(f"  composite falsifies clause {self.clause}")
        return "\n".join(lines)


def _models(phi: ClausalFormula, m: int) -> list[tuple[int, ...]]:
    ids = _ids(phi)
    full = (1 << m) - 1
    return [
        vals
        for vals in product(range(1 << m), repeat=len(ids))
        if falsified_clause(phi, dict(zip(ids, vals)), full) is None
    ]


def search_ei_counterexample(
    phi: ClausalFormula, m: int = 1, budget: int | None = None
) -> Counterexample | None:
    """First pair of ``m``-atom models (lexicographic) whose ``ei`` image falsifies ``phi``.

    ``None`` proves nothing: it only says no violation shows up at this size.
    """
    if m < 1:
        raise ValueError("atom budget must be positive")
    if budget is None:
        budget = Limits.from_env().pair_budget
    n = len(phi.vars)
    if (1 << (m * n)) > budget:
        raise CapExceeded(f"{n} variables over {m} atom(s) exceed the search budget {budget}")
    sats = _models(phi, m)
    if len(sats) ** 2 > budget:
        raise CapExceeded(f"{len(sats)}^2 model pairs exceed the search budget {budget}")
    ids = _ids(phi)
    big = (1 << (1 << (2 * m))) - 1
    for u in sats:
        for v in sats:
            w = tuple(finite_ei(a, b, m) for a, b in zip(u, v))
            bad = falsified_clause(phi, dict(zip(ids, w)), big)
            if bad is not None:
                return Counterexample(phi, m, u, v, w, bad)
    return None


class InternalInconsistency(RuntimeError):
    pass


@dataclass(frozen=True)
class MembershipVerdict:
    name: str
    member: bool
    reduction: ReductionOutcome
    atom_budget: int = 1

    @property
    def template(self) -> Template | None:
        return self.reduction.template

    @property
    def label(self) -> str:
        return "IN" if self.member else "OUT"

    def report(self) -> str:
        r = self.reduction
        if self.member:
            note = "" if r.template.strongly_reduced else " (arity above oracle cap; strong reduction skipped)"
            return (
                f"{self.name}: IN via Horn-Horn template{note}; "
                f"no ei counterexample with {self.atom_budget} atom(s) per side"
            )
        return (
            f"{self.name}: OUT, reduced form stays non-Horn at clause {r.offending_clause}"
        )


def check_membership(rdef: RelationDef, m: int | None = None, cap: int | None = None) -> MembershipVerdict:
    """Classify one relation.

    OUT when the reduced form keeps two positive literals in a clause.
    Otherwise the finite search runs as a guard on the original formula; a
    counterexample there contradicts the pipeline and raises
    ``InternalInconsistency``.
    """
    if m is None:
        m = Limits.from_env().atom_budget
    outcome = reduce_relation(rdef, cap=cap)
    if not outcome.horn_horn:
        return MembershipVerdict(rdef.name, False, outcome, atom_budget=m)
    cx = search_ei_counterexample(rdef.formula(), m)
    if cx is not None:
        raise InternalInconsistency(
            f"{rdef.name} reduced to Horn-Horn form but the finite search found:\n{cx.report()}"
        )
    return MembershipVerdict(rdef.name, True, outcome, atom_budget=m)
