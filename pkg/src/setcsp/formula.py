"""Set-constraint formulas: surface syntax trees, inner/outer CNF, Horn classification.

Two layers live here.  The *surface* layer (``Atom``, ``Not``, ``And``, ``Or``
over term trees) is what the parser produces.  The *clausal* layer is the
normal form every other module works on: a conjunction of outer clauses, each a
disjunction of literals ``t == 1`` / ``t != 1`` where ``t`` is a meet of inner
clauses and an inner clause is a join of possibly complemented variables.

Clausal containers are sorted tuples, so structural equality is plain ``==``
and iteration order is reproducible.  Variables inside literals are integer
ids; names live in ``ClausalFormula.vars``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, NamedTuple, Sequence, Union


@dataclass(frozen=True, order=True)
class Var:
    id: int
    name: str


class Lit(NamedTuple):
    """Inner literal: ``x`` when positive, ``~x`` otherwise."""

    var: int
    positive: bool


InnerClause = tuple[Lit, ...]
Term = tuple[InnerClause, ...]


class OuterLiteral(NamedTuple):
    """``term == 1`` when positive, ``term != 1`` otherwise."""

    term: Term
    positive: bool


OuterClause = tuple[OuterLiteral, ...]


@dataclass(frozen=True)
class ClausalFormula:
    clauses: tuple[OuterClause, ...]
    vars: tuple[Var, ...]

    def __post_init__(self):
        known = {v.id for v in self.vars}
        for clause in self.clauses:
            for lit in clause:
                for inner in lit.term:
                    for l in inner:
                        if l.var not in known:
                            raise ValueError(f"variable id {l.var} is not registered")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.vars)

    def name_of(self, var_id: int) -> str:
        for v in self.vars:
            if v.id == var_id:
                return v.name
        raise KeyError(var_id)


def inner_clause(lits: Iterable[Lit]) -> InnerClause:
    return tuple(sorted(set(lits)))


def make_term(clauses: Iterable[Iterable[Lit]]) -> Term:
    return tuple(sorted({inner_clause(c) for c in clauses}))


def outer_clause(lits: Iterable[OuterLiteral]) -> OuterClause:
    return tuple(sorted(set(lits)))


def is_tautology(clause: InnerClause) -> bool:
    pos = {l.var for l in clause if l.positive}
    return any(not l.positive and l.var in pos for l in clause)


def is_inner_horn(clause: InnerClause) -> bool:
    return sum(1 for l in clause if l.positive) <= 1


# --------------------------------------------------------------------------
# surface syntax


@dataclass(frozen=True)
class Span:
    begin: int
    end: int
    line: int
    column: int


@dataclass(frozen=True)
class TVar:
    name: str
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class TConst:
    value: int  # 0 or 1
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class TNot:
    arg: "TermTree"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class TMeet:
    args: tuple["TermTree", ...]
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class TJoin:
    args: tuple["TermTree", ...]
    span: Span | None = field(default=None, compare=False, repr=False)


TermTree = Union[TVar, TConst, TNot, TMeet, TJoin]


@dataclass(frozen=True)
class Atom:
    lhs: TermTree
    rhs: TermTree
    equal: bool  # True for ==, False for !=
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FConst:
    value: bool
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    arg: "SurfaceFormula"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class And:
    args: tuple["SurfaceFormula", ...]
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Or:
    args: tuple["SurfaceFormula", ...]
    span: Span | None = field(default=None, compare=False, repr=False)


SurfaceFormula = Union[Atom, FConst, Not, And, Or]

ONE = TConst(1)
ZERO = TConst(0)


def term_vars(t: TermTree) -> list[str]:
    """Variable names in order of first occurrence."""
    out: list[str] = []
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, TVar):
            if node.name not in out:
                out.append(node.name)
        elif isinstance(node, TNot):
            stack.append(node.arg)
        elif isinstance(node, (TMeet, TJoin)):
            stack.extend(reversed(node.args))
    return out


def formula_vars(f: SurfaceFormula) -> list[str]:
    out: list[str] = []

    def visit(node):
        if isinstance(node, Atom):
            for name in term_vars(node.lhs) + term_vars(node.rhs):
                if name not in out:
                    out.append(name)
        elif isinstance(node, Not):
            visit(node.arg)
        elif isinstance(node, (And, Or)):
            for a in node.args:
                visit(a)

    visit(f)
    return out


def desugar_atom(atom: Atom) -> Atom:
    """Rewrite ``s == t`` / ``s != t`` into ``T == 1`` / ``T != 1``.

    ``T`` is ``(~s | t) & (~t | s)``, which is 1 exactly when ``s`` and ``t``
    coincide.  Atoms already comparing against the constant 1 are kept.
    """
    s, t = atom.lhs, atom.rhs
    if t == ONE:
        return atom
    if s == ONE:
        return Atom(t, ONE, atom.equal, atom.span)
    both = TMeet((TJoin((TNot(s), t)), TJoin((TNot(t), s))))
    return Atom(both, ONE, atom.equal, atom.span)


def _cnf(t: TermTree, negate: bool) -> list[frozenset[Lit]]:
    # Returns a list of clauses (meet of joins) for t, or for ~t if negate.
    if isinstance(t, TConst):
        top = (t.value == 1) != negate
        return [] if top else [frozenset()]
    if isinstance(t, TVar):
        raise TypeError("unresolved variable; call to_inner_cnf with an index")
    if isinstance(t, _IdVar):
        return [frozenset([Lit(t.id, not negate)])]
    if isinstance(t, TNot):
        return _cnf(t.arg, not negate)
    is_meet = isinstance(t, TMeet) != negate
    parts = [_cnf(a, negate) for a in t.args]
    if is_meet:
        return [c for p in parts for c in p]
    out: list[frozenset[Lit]] = [frozenset()]
    for p in parts:
        out = [a | b for a in out for b in p]
    return out


@dataclass(frozen=True)
class _IdVar:
    id: int


def _resolve(t: TermTree, index: Mapping[str, int]):
    if isinstance(t, TVar):
        return _IdVar(index[t.name])
    if isinstance(t, TNot):
        return TNot(_resolve(t.arg, index))
    if isinstance(t, TMeet):
        return TMeet(tuple(_resolve(a, index) for a in t.args))
    if isinstance(t, TJoin):
        return TJoin(tuple(_resolve(a, index) for a in t.args))
    return t


def to_inner_cnf(t: TermTree, index: Mapping[str, int]) -> Term:
    """Inner CNF of a term tree by De Morgan and distribution.

    ``index`` maps variable names to ids.  No auxiliary variables are
    introduced, so the result can be exponentially larger than the input.
    """
    return make_term(_cnf(_resolve(t, index), False))


def _outer_cnf(f: SurfaceFormula, negate: bool, index) -> list[frozenset[OuterLiteral]]:
    if isinstance(f, FConst):
        return [] if f.value != negate else [frozenset()]
    if isinstance(f, Atom):
        a = desugar_atom(f)
        term = to_inner_cnf(a.lhs, index)
        return [frozenset([OuterLiteral(term, a.equal != negate)])]
    if isinstance(f, Not):
        return _outer_cnf(f.arg, not negate, index)
    is_and = isinstance(f, And) != negate
    parts = [_outer_cnf(a, negate, index) for a in f.args]
    if is_and:
        return [c for p in parts for c in p]
    out: list[frozenset[OuterLiteral]] = [frozenset()]
    for p in parts:
        out = [a | b for a in out for b in p]
    return out


def _dedup(items):
    seen = set()
    out = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return tuple(out)


def to_clausal(f: SurfaceFormula, var_order: Sequence[str] = ()) -> ClausalFormula:
    """Outer CNF with desugared atoms and inner-CNF terms.

    Variables are interned in ``var_order`` first, then by first occurrence.
    Clauses keep first-occurrence order (duplicates dropped).
    """
    names = list(var_order)
    for name in formula_vars(f):
        if name not in names:
            names.append(name)
    index = {name: i for i, name in enumerate(names)}
    clauses = _dedup(tuple(sorted(c)) for c in _outer_cnf(f, False, index))
    return ClausalFormula(clauses, tuple(Var(i, n) for i, n in enumerate(names)))


def _normalize_clause(clause: Iterable[OuterLiteral]) -> OuterClause | None:
    """Normalized literals of one outer clause, or None if the clause is true."""
    lits = set()
    for lit in clause:
        term = tuple(sorted({inner_clause(c) for c in lit.term if not is_tautology(c)}))
        if not term:
            if lit.positive:
                return None
            continue
        lits.add(OuterLiteral(term, lit.positive))
    return tuple(sorted(lits))


def normalize_clause_set(phi: ClausalFormula) -> ClausalFormula:
    """Drop tautological inner clauses, trivially true clauses and duplicates."""
    out = []
    for clause in phi.clauses:
        c = _normalize_clause(clause)
        if c is not None:
            out.append(c)
    return ClausalFormula(_dedup(out), phi.vars)


@dataclass(frozen=True)
class HornReport:
    outer_horn: bool
    positive_inner_horn: bool
    all_inner_horn: bool

    @property
    def horn_horn(self) -> bool:
        return self.outer_horn and self.positive_inner_horn


def classify_horn(phi: ClausalFormula) -> HornReport:
    outer = all(sum(1 for l in c if l.positive) <= 1 for c in phi.clauses)
    pos_inner = all(
        is_inner_horn(ic) for c in phi.clauses for l in c if l.positive for ic in l.term
    )
    all_inner = pos_inner and all(
        is_inner_horn(ic) for c in phi.clauses for l in c if not l.positive for ic in l.term
    )
    return HornReport(outer, pos_inner, all_inner)


def rename_clause(clause: OuterClause, mapping: Mapping[int, int]) -> OuterClause | None:
    return _normalize_clause(
        OuterLiteral(tuple(tuple(Lit(mapping[l.var], l.positive) for l in ic) for ic in lit.term), lit.positive)
        for lit in clause
    )


def substitute(
    template: ClausalFormula,
    args: Sequence[Var],
    context: Sequence[Var] | None = None,
) -> ClausalFormula:
    """Instantiate a template's parameters (its ``vars``, in order) with ``args``.

    The result is normalized, so repeated arguments can collapse literals and
    drop tautological clauses.  Its variable list is ``context`` when given,
    otherwise the distinct arguments.
    """
    if len(args) != len(template.vars):
        raise ValueError(f"arity mismatch: template takes {len(template.vars)} arguments, got {len(args)}")
    mapping = {p.id: a.id for p, a in zip(template.vars, args)}
    clauses = []
    for clause in template.clauses:
        c = rename_clause(clause, mapping)
        if c is not None:
            clauses.append(c)
    if context is None:
        context = sorted(set(args))
    return ClausalFormula(_dedup(clauses), tuple(context))


# --------------------------------------------------------------------------
# evaluation over finite powerset algebras (values are bitmasks)


def term_value(term: Term, values: Mapping[int, int], full: int) -> int:
    acc = full
    for clause in term:
        c = 0
        for v, positive in clause:
            c |= values[v] if positive else full & ~values[v]
        acc &= c
        if not acc:
            break
    return acc


def holds(phi: ClausalFormula | Iterable[OuterClause], values: Mapping[int, int], full: int) -> bool:
    """Truth of a clausal formula when variable ``id`` denotes ``values[id]``."""
    return falsified_clause(phi, values, full) is None


def falsified_clause(phi, values: Mapping[int, int], full: int) -> int | None:
    clauses = phi.clauses if isinstance(phi, ClausalFormula) else phi
    for i, clause in enumerate(clauses):
        for term, positive in clause:
            if (term_value(term, values, full) == full) == positive:
                break
        else:
            return i
    return None


# --------------------------------------------------------------------------
# relation definitions and instances


@dataclass(frozen=True)
class RelationDef:
    name: str
    params: tuple[str, ...]
    body: SurfaceFormula
    builtin: bool = False

    @property
    def arity(self) -> int:
        return len(self.params)

    def formula(self) -> ClausalFormula:
        """Normalized clausal form over the parameters (ids 0..k-1)."""
        return normalize_clause_set(to_clausal(self.body, self.params))


@dataclass(frozen=True)
class Constraint:
    relation: str
    args: tuple[int, ...]
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class CspInstance:
    defs: Mapping[str, RelationDef]
    vars: tuple[Var, ...]
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        n = len(self.vars)
        for c in self.constraints:
            rdef = self.defs.get(c.relation)
            if rdef is None:
                raise ValueError(f"unknown relation {c.relation!r}")
            if len(c.args) != rdef.arity:
                raise ValueError(
                    f"arity mismatch: {c.relation} takes {rdef.arity} arguments, got {len(c.args)}"
                )
            if any(not 0 <= a < n for a in c.args):
                raise ValueError(f"constraint {c.relation} refers to an unknown variable")

    def __eq__(self, other):
        if not isinstance(other, CspInstance):
            return NotImplemented
        return (
            dict(self.defs) == dict(other.defs)
            and self.vars == other.vars
            and self.constraints == other.constraints
        )

    __hash__ = None


def compile_instance(
    inst: CspInstance, templates: Mapping[str, ClausalFormula] | None = None
) -> ClausalFormula:
    """Conjunction of all constraints, each instantiated from its template.

    Without ``templates`` the relation definitions themselves are used, which
    gives a formula equivalent to the instance.
    """
    cache: dict[str, ClausalFormula] = {}
    clauses: list[OuterClause] = []
    for c in inst.constraints:
        tmpl = cache.get(c.relation)
        if tmpl is None:
            if templates is not None:
                if c.relation not in templates:
                    raise KeyError(f"no template for relation {c.relation!r}")
                tmpl = templates[c.relation]
            else:
                tmpl = inst.defs[c.relation].formula()
            cache[c.relation] = tmpl
        mapping = {p.id: a for p, a in zip(tmpl.vars, c.args)}
        for clause in tmpl.clauses:
            oc = rename_clause(clause, mapping)
            if oc is not None:
                clauses.append(oc)
    return ClausalFormula(_dedup(clauses), inst.vars)


def all_assignments(n: int, size: int):
    """All tuples of ``n`` masks over a ``size``-point universe, lexicographically."""
    return product(range(1 << size), repeat=n)
