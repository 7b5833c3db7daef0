"""Text formats: formulas, instances, DIMACS 3SAT and JSON witnesses.

Formula grammar (``&`` is meet, ``|`` is join, ``~`` complement; join binds
tighter than meet, and term operators never mix with the formula keywords)::

    formula := conj ("or" conj)*
    conj    := unit ("and" unit)*
    unit    := "not" unit | "(" formula ")" | "true" | "false" | atom
    atom    := term ("==" | "!=") term
    term    := tjoin ("&" tjoin)*
    tjoin   := tunary ("|" tunary)*
    tunary  := "~" tunary | "(" term ")" | "0" | "1" | ident

Instance files hold one statement per line: ``rel NAME(p, ...) := formula``,
``builtin NAME`` (one of U, I, Neq), ``var a b ...`` and constraints
``NAME(a, ...)``.  ``#`` starts a comment.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .formula import (
    And,
    Atom,
    ClausalFormula,
    Constraint,
    CspInstance,
    FConst,
    Not,
    Or,
    RelationDef,
    Span,
    SurfaceFormula,
    TConst,
    TJoin,
    TMeet,
    TNot,
    TVar,
    Var,
    formula_vars,
    normalize_clause_set,
    to_clausal,
)
from .gadgets import BUILTINS, Cnf3
from .oracle import BlockModel

KEYWORDS = {"and", "or", "not", "true", "false", "rel", "builtin", "var"}


class ParseError(ValueError):
    def __init__(self, message: str, span: Span | None = None):
        self.message = message
        self.span = span
        where = f"{span.line}:{span.column}: " if span else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, const, op, kw, eof
    text: str
    span: Span


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<num>[0-9]+)"
    r"|(?P<op>==|!=|:=|[&|~(),])"
)


def tokenize(text: str, base: int = 0, line: int = 1) -> list[Token]:
    """Tokens of ``text``; ``base`` and ``line`` place spans inside a larger source."""
    out = []
    pos = 0
    line_start = 0

    def span(begin: int, end: int) -> Span:
        return Span(base + begin, base + end, line, begin - line_start + 1)

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos] == "\n":
                pos += 1
                line += 1
                line_start = pos
                continue
            raise ParseError(f"unexpected character {text[pos]!r}", span(pos, pos + 1))
        sp = span(m.start(), m.end())
        if m.lastgroup == "ident":
            kind = "kw" if m.group() in KEYWORDS else "ident"
            out.append(Token(kind, m.group(), sp))
        elif m.lastgroup == "num":
            if m.group() not in ("0", "1"):
                raise ParseError(f"only the constants 0 and 1 are allowed, got {m.group()}", sp)
            out.append(Token("const", m.group(), sp))
        elif m.lastgroup == "op":
            out.append(Token("op", m.group(), sp))
        pos = m.end()
    out.append(Token("eof", "", span(len(text), len(text))))
    return out


def _join_span(a: Span, b: Span) -> Span:
    return Span(a.begin, b.end, a.line, a.column)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def expect(self, kind: str, text: str | None = None) -> Token:
        if not self.at(kind, text):
            want = text or kind
            got = self.tok.text or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", self.tok.span)
        return self.take()

    def operand_after(self, op: Token):
        t = self.tok
        if t.kind in ("ident", "const") or (t.kind == "op" and t.text in ("(", "~")):
            return
        raise ParseError(f"operator {op.text!r} is missing its right operand", op.span)

    def formula(self) -> SurfaceFormula:
        first = self.tok.span
        args = [self.conj()]
        while self.at("kw", "or"):
            self.take()
            args.append(self.conj())
        if len(args) == 1:
            return args[0]
        return Or(tuple(args), _join_span(first, self.toks[self.i - 1].span))

    def conj(self) -> SurfaceFormula:
        first = self.tok.span
        args = [self.unit()]
        while self.at("kw", "and"):
            self.take()
            args.append(self.unit())
        if len(args) == 1:
            return args[0]
        return And(tuple(args), _join_span(first, self.toks[self.i - 1].span))

    def unit(self) -> SurfaceFormula:
        t = self.tok
        if self.at("kw", "not"):
            self.take()
            arg = self.unit()
            return Not(arg, _join_span(t.span, self.toks[self.i - 1].span))
        if self.at("kw", "true") or self.at("kw", "false"):
            self.take()
            return FConst(t.text == "true", t.span)
        if self.at("op", "("):
            save = self.i
            try:
                self.take()
                inner = self.formula()
                self.expect("op", ")")
                if not (self.at("op") and self.tok.text in ("==", "!=", "&", "|")):
                    return inner
            except ParseError:
                pass
            self.i = save
        return self.atom()

    def atom(self) -> Atom:
        first = self.tok.span
        lhs = self.term()
        if not (self.at("op", "==") or self.at("op", "!=")):
            got = self.tok.text or "end of input"
            raise ParseError(f"expected '==' or '!=', found {got!r}", self.tok.span)
        op = self.take()
        self.operand_after(op)
        equal = op.text == "=="
        rhs = self.term()
        return Atom(lhs, rhs, equal, _join_span(first, self.toks[self.i - 1].span))

    def term(self):
        first = self.tok.span
        args = [self.tjoin()]
        while self.at("op", "&"):
            self.operand_after(self.take())
            args.append(self.tjoin())
        if len(args) == 1:
            return args[0]
        return TMeet(tuple(args), _join_span(first, self.toks[self.i - 1].span))

    def tjoin(self):
        first = self.tok.span
        args = [self.tunary()]
        while self.at("op", "|"):
            self.operand_after(self.take())
            args.append(self.tunary())
        if len(args) == 1:
            return args[0]
        return TJoin(tuple(args), _join_span(first, self.toks[self.i - 1].span))

    def tunary(self):
        t = self.tok
        if self.at("op", "~"):
            self.operand_after(self.take())
            arg = self.tunary()
            return TNot(arg, _join_span(t.span, self.toks[self.i - 1].span))
        if self.at("op", "("):
            self.take()
            inner = self.term()
            self.expect("op", ")")
            return inner
        if t.kind == "const":
            self.take()
            return TConst(int(t.text), t.span)
        if t.kind == "ident":
            self.take()
            return TVar(t.text, t.span)
        got = t.text or "end of input"
        raise ParseError(f"expected a term, found {got!r}", t.span)


def _as_text(data) -> str:
    if isinstance(data, (bytes, bytearray)):
        try:
            return bytes(data).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8 ({exc.reason} at byte {exc.start})") from None
    return data


def _guard(fn, *args):
    try:
        return fn(*args)
    except RecursionError:
        raise ParseError("input nested too deeply") from None


def _parse_formula_tokens(tokens: list[Token]) -> SurfaceFormula:
    p = _Parser(tokens)
    f = p.formula()
    if not p.at("eof"):
        raise ParseError(f"unexpected {p.tok.text!r} after formula", p.tok.span)
    return f


def parse_formula(text: str | bytes) -> SurfaceFormula:
    text = _as_text(text)
    return _guard(lambda: _parse_formula_tokens(tokenize(text)))


def parse_clausal(text: str | bytes, var_order=()) -> ClausalFormula:
    """Parse and convert to normalized clausal form in one step."""
    return normalize_clause_set(to_clausal(parse_formula(text), var_order))


# --------------------------------------------------------------------------
# instances

def _strip_comment(line: str) -> str:
    k = line.find("#")
    return line if k < 0 else line[:k]


def _parse_instance(text: str) -> CspInstance:
    defs: dict[str, RelationDef] = {}
    var_names: list[str] = []
    var_index: dict[str, int] = {}
    cons: list[Constraint] = []

    def intern(name: str) -> int:
        if name not in var_index:
            var_index[name] = len(var_names)
            var_names.append(name)
        return var_index[name]

    offset = 0
    for lineno, raw in enumerate(text.split("\n"), 1):
        base = offset
        offset += len(raw) + 1
        line = _strip_comment(raw)
        if not line.strip():
            continue
        toks = tokenize(line, base, lineno)
        head = toks[0]
        if head.kind == "kw" and head.text == "rel":
            p = _Parser(toks)
            p.take()
            name = p.expect("ident")
            p.expect("op", "(")
            params = []
            if not p.at("op", ")"):
                params.append(p.expect("ident").text)
                while p.at("op", ","):
                    p.take()
                    params.append(p.expect("ident").text)
            p.expect("op", ")")
            p.expect("op", ":=")
            body = p.formula()
            if not p.at("eof"):
                raise ParseError(f"unexpected {p.tok.text!r} after formula", p.tok.span)
            if name.text in defs:
                raise ParseError(f"duplicate relation {name.text!r}", name.span)
            if len(set(params)) != len(params):
                raise ParseError(f"repeated parameter in {name.text}", name.span)
            unknown = [v for v in formula_vars(body) if v not in params]
            if unknown:
                raise ParseError(f"variable {unknown[0]!r} is not a parameter of {name.text}", name.span)
            defs[name.text] = RelationDef(name.text, tuple(params), body)
        elif head.kind == "kw" and head.text == "builtin":
            p = _Parser(toks)
            p.take()
            while not p.at("eof"):
                name = p.expect("ident")
                if name.text not in BUILTINS:
                    raise ParseError(f"unknown builtin {name.text!r} (choose from U, I, Neq)", name.span)
                if name.text in defs:
                    raise ParseError(f"duplicate relation {name.text!r}", name.span)
                defs[name.text] = BUILTINS[name.text]
        elif head.kind == "kw" and head.text == "var":
            for t in toks[1:-1]:
                if t.kind != "ident":
                    raise ParseError(f"expected a variable name, found {t.text!r}", t.span)
                intern(t.text)
        elif head.kind == "ident":
            p = _Parser(toks)
            name = p.take()
            p.expect("op", "(")
            args = []
            if not p.at("op", ")"):
                args.append(p.expect("ident"))
                while p.at("op", ","):
                    p.take()
                    args.append(p.expect("ident"))
            close = p.expect("op", ")")
            if not p.at("eof"):
                raise ParseError(f"unexpected {p.tok.text!r} after constraint", p.tok.span)
            rdef = defs.get(name.text)
            if rdef is None:
                raise ParseError(f"unknown relation {name.text!r}", name.span)
            if len(args) != rdef.arity:
                raise ParseError(
                    f"arity mismatch: {name.text} takes {rdef.arity} arguments, got {len(args)}", name.span
                )
            cons.append(Constraint(name.text, tuple(intern(a.text) for a in args), _join_span(name.span, close.span)))
        else:
            raise ParseError(f"unexpected {head.text!r} at start of statement", head.span)
    return CspInstance(defs, tuple(Var(i, n) for i, n in enumerate(var_names)), tuple(cons))


def parse_instance(text: str | bytes) -> CspInstance:
    text = _as_text(text)
    return _guard(_parse_instance, text)


# --------------------------------------------------------------------------
# rendering


def _render_term(t, top: bool = True) -> str:
    if isinstance(t, TVar):
        return t.name
    if isinstance(t, TConst):
        return str(t.value)
    if isinstance(t, TNot):
        return "~" + _render_term(t.arg, False)
    sep = " & " if isinstance(t, TMeet) else " | "
    body = sep.join(_render_term(a, False) for a in t.args)
    return body if top else f"({body})"


def _render_formula(f, top: bool = True) -> str:
    if isinstance(f, Atom):
        op = "==" if f.equal else "!="
        return f"{_render_term(f.lhs)} {op} {_render_term(f.rhs)}"
    if isinstance(f, FConst):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        return "not " + _render_formula(f.arg, False)
    sep = " and " if isinstance(f, And) else " or "
    body = sep.join(_render_formula(a, False) for a in f.args)
    return body if top else f"({body})"


def _render_clausal(phi: ClausalFormula) -> str:
    names = {v.id: v.name for v in phi.vars}
    if not phi.clauses:
        return "true"

    def term(t) -> str:
        if not t:
            return "1"
        parts = []
        for ic in t:
            lits = [names[v] if pos else "~" + names[v] for v, pos in ic]
            parts.append(" | ".join(lits) if lits else "0")
        if len(parts) == 1:
            return parts[0]
        return " & ".join(f"({p})" if " | " in p else p for p in parts)

    clauses = []
    for clause in phi.clauses:
        if not clause:
            clauses.append("false")
            continue
        lits = [f"{term(t)} {'==' if pos else '!='} 1" for t, pos in clause]
        c = " or ".join(lits)
        clauses.append(f"({c})" if len(lits) > 1 and len(phi.clauses) > 1 else c)
    return " and ".join(clauses)


def _render_instance(inst: CspInstance) -> str:
    lines = []
    builtins = sorted(n for n, d in inst.defs.items() if d.builtin)
    if builtins:
        lines.append("builtin " + " ".join(builtins))
    for name in sorted(inst.defs):
        d = inst.defs[name]
        if not d.builtin:
            lines.append(f"rel {name}({', '.join(d.params)}) := {_render_formula(d.body)}")
    if inst.vars:
        lines.append("var " + " ".join(v.name for v in inst.vars))
    names = [v.name for v in inst.vars]
    for c in inst.constraints:
        lines.append(f"{c.relation}({', '.join(names[a] for a in c.args)})")
    return "\n".join(lines) + "\n"


def render(obj) -> str:
    """Deterministic text for a surface formula, clausal formula or instance."""
    if isinstance(obj, CspInstance):
        return _render_instance(obj)
    if isinstance(obj, ClausalFormula):
        return _render_clausal(obj)
    if isinstance(obj, tuple):  # a single outer clause
        if not obj:
            return "false"
        raise TypeError("render a ClausalFormula instead of a bare clause")
    return _render_formula(obj)


# --------------------------------------------------------------------------
# DIMACS


def parse_dimacs_3sat(text: str | bytes) -> Cnf3:
    """Read ``p cnf n m`` followed by ``m`` clauses of exactly three literals each."""
    text = _as_text(text)
    header = None
    nums: list[tuple[int, int]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("c"):
            continue
        if s.startswith("%"):
            break
        if s.startswith("p"):
            parts = s.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: malformed header {s!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"line {lineno}: malformed header {s!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise ParseError(f"line {lineno}: negative counts in header")
            continue
        if header is None:
            raise ParseError(f"line {lineno}: clause before the 'p cnf' header")
        for tok in s.split():
            try:
                nums.append((int(tok), lineno))
            except ValueError:
                raise ParseError(f"line {lineno}: bad literal {tok!r}") from None
    if header is None:
        raise ParseError("missing 'p cnf' header")
    n, m = header
    clauses = []
    cur: list[int] = []
    for lit, lineno in nums:
        if lit == 0:
            if len(cur) != 3:
                raise ParseError(f"line {lineno}: clause has {len(cur)} literals, need exactly 3")
            clauses.append(tuple(cur))
            cur = []
            continue
        if abs(lit) > n:
            raise ParseError(f"line {lineno}: literal {lit} exceeds variable count {n}")
        cur.append(lit)
    if cur:
        raise ParseError("last clause is not terminated by 0")
    if len(clauses) != m:
        raise ParseError(f"header announces {m} clauses, found {len(clauses)}")
    return Cnf3(n, tuple(clauses))


# --------------------------------------------------------------------------
# witnesses


def encode_witness(model: BlockModel) -> str:
    data = {"blocks": model.s, "assignment": {name: model.blocks(name) for name in model.values}}
    return json.dumps(data, sort_keys=True) + "\n"


def decode_witness(text: str | bytes, names=None) -> BlockModel:
    """Parse a witness; ``names`` lists variables that must be present."""
    text = _as_text(text)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"witness is not valid JSON: {exc.msg}") from None
    if not isinstance(data, dict) or "blocks" not in data or "assignment" not in data:
        raise ParseError("witness needs the keys 'blocks' and 'assignment'")
    s = data["blocks"]
    if not isinstance(s, int) or isinstance(s, bool) or s < 1:
        raise ParseError(f"'blocks' must be a positive integer, got {s!r}")
    assignment = data["assignment"]
    if not isinstance(assignment, dict):
        raise ParseError("'assignment' must map variable names to block lists")
    values = {}
    for name, idx in assignment.items():
        if not isinstance(idx, list) or not all(isinstance(j, int) and not isinstance(j, bool) for j in idx):
            raise ParseError(f"blocks of {name!r} must be a list of integers")
        bad = [j for j in idx if not 0 <= j < s]
        if bad:
            raise ParseError(f"block index {bad[0]} of {name!r} out of range for {s} blocks")
        values[name] = idx
    if names is not None:
        missing = [n for n in names if n not in values]
        if missing:
            raise ParseError(f"witness has no value for variable {missing[0]!r}")
    return BlockModel.from_sets(s, values)
