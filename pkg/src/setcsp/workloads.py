"""Generated instance families used by the benchmarks and the acceptance suite."""

from __future__ import annotations

from dataclasses import dataclass

from .formula import CspInstance
from .parser import parse_instance


@dataclass(frozen=True)
class ChainConfig:
    """``n`` links; link ``i`` only becomes an equality after link ``i-1`` did."""

    n: int


def chain_text(cfg: ChainConfig) -> str:
    # b_i <= a_i everywhere; a_0 <= b_0 seeds the chain; a_i != b_i or a_{i+1} <= b_{i+1}.
    # Each outer pass can only retire one disequality, so there are n passes.
    lines = [
        "rel Sub(x, y) := ~x | y == 1",
        "rel Imp(x1, y1, x0, y0) := (x1 != y1) or (~x0 | y0 == 1)",
    ]
    for i in range(cfg.n + 1):
        lines.append(f"Sub(b{i}, a{i})")
    lines.append("Sub(a0, b0)")
    for i in range(cfg.n):
        lines.append(f"Imp(a{i}, b{i}, a{i + 1}, b{i + 1})")
    return "\n".join(lines) + "\n"


def chain_instance(cfg: ChainConfig) -> CspInstance:
    return parse_instance(chain_text(cfg))


@dataclass(frozen=True)
class OntologyConfig:
    """Concept-inclusion chains ``A_i & B_i <= C_i``, ``C_i <= A_{i+1}``, ``C_i`` disjoint from ``D_i``."""

    links: int
    inconsistent: bool = False

    @property
    def constraints(self) -> int:
        return 6 * self.links + (5 if self.inconsistent else 0)


DL_RELATIONS = [
    "rel Sub(x, y) := ~x | y == 1",
    "rel Sub3(x, y, z) := ~x | ~y | z == 1",
    "rel Disj(x, y) := ~x | ~y == 1",
    "rel NonEmpty(x) := x != 0",
]


def ontology_text(cfg: OntologyConfig) -> str:
    lines = list(DL_RELATIONS)
    for i in range(cfg.links):
        lines += [
            f"Sub3(A{i}, B{i}, C{i})",
            f"Sub(C{i}, A{i + 1})",
            f"Sub(B{i}, B{i + 1})",
            f"Disj(C{i}, D{i})",
            f"NonEmpty(A{i})",
            f"NonEmpty(D{i})",
        ]
    if cfg.inconsistent:
        # P <= Q, P <= R, Q & R <= S, P disjoint from S forces P to be empty
        lines += ["Sub(P, Q)", "Sub(P, R)", "Sub3(Q, R, S)", "Disj(P, S)", "NonEmpty(P)"]
    return "\n".join(lines) + "\n"


def ontology_instance(cfg: OntologyConfig) -> CspInstance:
    return parse_instance(ontology_text(cfg))
