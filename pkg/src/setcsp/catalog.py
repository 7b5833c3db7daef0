"""Named example relations with their known EI classification."""

from __future__ import annotations

from .formula import RelationDef
from .parser import parse_instance

# name -> (definition, expected member of EI)
EXAMPLES: dict[str, tuple[str, bool]] = {
    "Subset": ("rel Subset(x, y) := ~x | y == 1", True),
    "Disjoint": ("rel Disjoint(x, y) := ~x | ~y == 1", True),
    "Neq": ("rel Neq(x, y) := x != y", True),
    "NeqOrEq": ("rel NeqOrEq(x, y, u, v) := x != y or u == v", True),
    "MeetSub": ("rel MeetSub(x, y, z) := ~x | ~y | z == 1", True),
    "Cover": ("rel Cover(x, y) := (x | y) == 1", False),
    "EqOrEq": ("rel EqOrEq(x, y, z) := x == y or y == z", False),
    "Union": ("rel Union(x, y, z) := (x | y) == z", False),
    "SplitNeq": (
        "rel SplitNeq(x, y, u, v) := (x & y != x) and (x & y != y) and (v == 1 or u == 1 or (x | y) != 1)",
        True,
    ),
    "SplitPos": (
        "rel SplitPos(x, y, u, v) := ((x | y != 1) or ((u | v) == 1)) and (~x | y != 1) and (x | ~y != 1)",
        True,
    ),
}


def dj_text(k: int, inclusion: bool = True, name: str | None = None) -> str:
    """``x1 != y1 or .. or xk != yk [or x0 <= y0]`` as a relation definition."""
    name = name or f"DJ{k}{'s' if inclusion else ''}"
    params = [p for i in range(1, k + 1) for p in (f"x{i}", f"y{i}")]
    parts = [f"x{i} != y{i}" for i in range(1, k + 1)]
    if inclusion:
        params += ["x0", "y0"]
        parts.append("~x0 | y0 == 1")
    return f"rel {name}({', '.join(params)}) := {' or '.join(parts)}"


def dj_forms(max_k: int = 3) -> dict[str, str]:
    out = {}
    for k in range(1, max_k + 1):
        for inc in (False, True):
            text = dj_text(k, inc)
            out[text.split("(")[0].split()[1]] = text
    return out


def relation(text: str) -> RelationDef:
    defs = parse_instance(text + "\n").defs
    (rdef,) = defs.values()
    return rdef


def example(name: str) -> RelationDef:
    return relation(EXAMPLES[name][0])
