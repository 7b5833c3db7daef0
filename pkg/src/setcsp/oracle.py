"""Brute-force ground truth for set-constraint formulas.

Key fact: for variables ``x_0..x_{n-1}`` taking values in the subsets of
an infinite set, every term denotes a union of *minterm regions* (the 2^n
intersections of each ``x_i`` or its complement).  Whether ``t == 1`` holds
depends only on which regions are nonempty: it holds iff every nonempty region
lies inside ``t``.  Any nonzero pattern of nonempty regions is realizable by
splitting the natural numbers into that many infinite classes, so the
``2^(2^n) - 1`` nonzero patterns are a complete set of small models.  Two-valued
evaluation per valuation is justified by the ultrafilter argument for Boolean
algebras (satisfiable somewhere iff satisfiable over {0, 1} pointwise), and the
pattern enumeration is complete for every infinite Boolean algebra
(Marriott and Odersky: satisfiable in one infinite Boolean algebra iff in all).

Conventions: valuation ``w`` is an integer whose bit ``i`` is the value of the
i-th variable of ``phi.vars``.  A pattern is stored as a tuple ``bits`` with
``bits[w]`` the nonemptiness of region ``w``; patterns are enumerated in
lexicographic order of that tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .config import CapExceeded, Limits, oracle_cap
from .formula import ClausalFormula, CspInstance, Var, compile_instance, falsified_clause, term_value


@dataclass(frozen=True)
class MintermPattern:
    n: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != 1 << self.n:
            raise ValueError("pattern length must be 2**n")
        if not any(self.bits):
            raise ValueError("a minterm pattern needs at least one nonempty region")

    @property
    def mask(self) -> int:
        return sum(1 << w for w, b in enumerate(self.bits) if b)

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "MintermPattern":
        return cls(n, tuple((mask >> w) & 1 for w in range(1 << n)))


@dataclass(frozen=True)
class BlockModel:
    """A finite witness: ``s`` blocks of a partition, each variable a union of blocks.

    ``values`` maps variable names to bitmasks over block indices.
    """

    s: int
    values: Mapping[str, int]

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("a block model needs at least one block")
        full = (1 << self.s) - 1
        for name, mask in self.values.items():
            if mask & ~full or mask < 0:
                raise ValueError(f"block index out of range for {name!r}")

    def blocks(self, name: str) -> list[int]:
        mask = self.values[name]
        return [j for j in range(self.s) if (mask >> j) & 1]

    @classmethod
    def from_sets(cls, s: int, values: Mapping[str, Sequence[int]]) -> "BlockModel":
        masks = {}
        for name, idx in values.items():
            m = 0
            for j in idx:
                if not 0 <= j < s:
                    raise ValueError(f"block index {j} out of range for {name!r} (s={s})")
                m |= 1 << j
            masks[name] = m
        return cls(s, masks)

    def __eq__(self, other):
        if not isinstance(other, BlockModel):
            return NotImplemented
        return self.s == other.s and dict(self.values) == dict(other.values)

    def __hash__(self):
        return hash((self.s, tuple(sorted(self.values.items()))))


def _check_cap(n: int, cap: int | None):
    limit = oracle_cap(cap)
    if n > limit:
        raise CapExceeded(f"oracle refuses {n} variables (cap {limit}); raise the cap explicitly")


def truth_table(term, index: Mapping[int, int], n: int) -> int:
    """Bitmask over valuations ``w`` where ``term`` evaluates to 1 two-valuedly."""
    size = 1 << n
    full = (1 << size) - 1
    values = {}
    for var_id, i in index.items():
        values[var_id] = sum(1 << w for w in range(size) if (w >> i) & 1)
    return term_value(term, values, full)


def _index(phi: ClausalFormula) -> dict[int, int]:
    return {v.id: i for i, v in enumerate(phi.vars)}


def eval_pattern(phi: ClausalFormula, b: MintermPattern) -> bool:
    n = len(phi.vars)
    if b.n != n:
        raise ValueError(f"pattern has {b.n} variables, formula has {n}")
    index = _index(phi)
    mask = b.mask
    for clause in phi.clauses:
        for term, positive in clause:
            inside = mask & ~truth_table(term, index, n) == 0
            if inside == positive:
                break
        else:
            return False
    return True


_CHUNK = 1 << 20


def _reverse_bits(k: np.ndarray, size: int) -> np.ndarray:
    # bit w of the result is bit size-1-w of k: pattern index -> region mask
    out = np.zeros_like(k)
    for w in range(size):
        out |= ((k >> np.uint64(size - 1 - w)) & np.uint64(1)) << np.uint64(w)
    return out


@lru_cache(maxsize=None)
def _lex_masks(n: int) -> np.ndarray:
    # k-th entry (k = 0..2^N-2) is the mask of the k-th nonzero pattern in
    # lexicographic order of (b_0, b_1, ...)
    size = 1 << n
    return _reverse_bits(np.arange(1, 1 << size, dtype=np.uint64), size)


def _mask_chunks(n: int):
    """Region masks of all nonzero patterns in lexicographic order, in bounded chunks."""
    if n <= 4:
        yield _lex_masks(n)
        return
    size = 1 << n
    total = 1 << size
    for start in range(1, total, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, total), dtype=np.uint64)
        yield _reverse_bits(k, size)


@lru_cache(maxsize=512)
def _literal_vector(n: int, table: int, positive: bool) -> np.ndarray:
    return _literal_on(_lex_masks(n), n, table, positive)


def _literal_on(masks: np.ndarray, n: int, table: int, positive: bool) -> np.ndarray:
    outside = np.uint64(((1 << (1 << n)) - 1) & ~table)
    inside = (masks & outside) == 0
    return inside if positive else ~inside


def _prepare(phi: ClausalFormula, names: Sequence[str]):
    n = len(names)
    pos = {name: i for i, name in enumerate(names)}
    index = {v.id: pos[v.name] for v in phi.vars}
    return [[(truth_table(term, index, n), positive) for term, positive in clause] for clause in phi.clauses]


def _eval_chunk(tables, n: int, masks: np.ndarray) -> np.ndarray:
    cached = n <= 4
    acc = np.ones(len(masks), dtype=bool)
    for clause in tables:
        c = np.zeros(len(masks), dtype=bool)
        for table, positive in clause:
            c |= _literal_vector(n, table, positive) if cached else _literal_on(masks, n, table, positive)
        acc &= c
    return acc


def _sat_chunks(phi: ClausalFormula, names: Sequence[str], cap: int | None):
    n = len(names)
    _check_cap(n, cap)
    tables = _prepare(phi, names)
    for masks in _mask_chunks(n):
        yield masks, _eval_chunk(tables, n, masks)


def sat_vector(phi: ClausalFormula, names: Sequence[str] | None = None, cap: int | None = None) -> np.ndarray:
    """Boolean vector over all nonzero patterns (lexicographic order): does ``phi`` hold?

    ``names`` fixes the variable order (a superset of ``phi``'s variables).
    """
    if names is None:
        names = phi.names
    return np.concatenate([vec for _, vec in _sat_chunks(phi, names, cap)])


def oracle_sat(phi: ClausalFormula, cap: int | None = None) -> MintermPattern | None:
    """First satisfying minterm pattern in lexicographic order, or None if unsatisfiable."""
    n = len(phi.vars)
    for masks, vec in _sat_chunks(phi, phi.names, cap):
        hits = np.flatnonzero(vec)
        if len(hits):
            return MintermPattern.from_mask(n, int(masks[hits[0]]))
    return None


def _shared_names(phi: ClausalFormula, psi: ClausalFormula) -> list[str]:
    names = list(phi.names)
    for name in psi.names:
        if name not in names:
            names.append(name)
    return names


def _pairs(phi, psi, cap):
    names = _shared_names(phi, psi)
    return zip(_sat_chunks(phi, names, cap), _sat_chunks(psi, names, cap))


def oracle_equiv(phi: ClausalFormula, psi: ClausalFormula, cap: int | None = None) -> bool:
    return all(np.array_equal(a, b) for (_, a), (_, b) in _pairs(phi, psi, cap))


def oracle_entails(phi: ClausalFormula, psi: ClausalFormula, cap: int | None = None) -> bool:
    return not any(np.any(a & ~b) for (_, a), (_, b) in _pairs(phi, psi, cap))


def block_values(phi: ClausalFormula, m: BlockModel) -> dict[int, int]:
    values = {}
    for v in phi.vars:
        if v.name not in m.values:
            raise KeyError(f"block model has no value for variable {v.name!r}")
        values[v.id] = m.values[v.name]
    return values


def eval_block_model(phi: ClausalFormula, m: BlockModel) -> bool:
    """Truth of ``phi`` when each variable denotes the union of its blocks."""
    return falsified_clause(phi, block_values(phi, m), (1 << m.s) - 1) is None


def pattern_to_block_model(b: MintermPattern, vars: Sequence[Var]) -> BlockModel:
    if b.n != len(vars):
        raise ValueError("pattern and variable list disagree in length")
    regions = [w for w, bit in enumerate(b.bits) if bit]
    values = {}
    for i, v in enumerate(vars):
        values[v.name] = sum(1 << j for j, w in enumerate(regions) if (w >> i) & 1)
    return BlockModel(len(regions), values)


def brute_force_points(
    instance: CspInstance, p: int, budget: int | None = None
) -> BlockModel | None:
    """Search assignments of subsets of a ``p``-point universe to the instance variables.

    Depth-first over the value tuple, each value running from the full set
    down to the empty set, checking each clause as soon as its variables are
    assigned; the first model found is returned as a block model with ``s = p``.  ``None`` only means no model over ``p``
    points exists, not that the instance is unsatisfiable in general.
    """
    if p < 1:
        raise ValueError("need at least one point")
    if budget is None:
        budget = Limits.from_env().point_budget
    n = len(instance.vars)
    if n * p > 62 or (1 << (n * p)) > budget:
        raise CapExceeded(f"(2^{p})^{n} assignments exceed the search budget {budget}")
    phi = compile_instance(instance)
    pos = {v.id: i for i, v in enumerate(phi.vars)}
    # bucket clauses by the last variable they mention
    buckets: list[list] = [[] for _ in range(n)]
    always = []
    for clause in phi.clauses:
        ids = [l.var for lit in clause for ic in lit.term for l in ic]
        if ids:
            buckets[max(pos[i] for i in ids)].append(clause)
        else:
            always.append(clause)
    full = (1 << p) - 1
    if falsified_clause(always, {}, full) is not None:
        return None
    values: dict[int, int] = {}
    order = [v.id for v in phi.vars]

    def dfs(i: int) -> bool:
        if i == n:
            return True
        vid = order[i]
        for val in range(full, -1, -1):
            values[vid] = val
            if falsified_clause(buckets[i], values, full) is None and dfs(i + 1):
                return True
        del values[vid]
        return False

    if not dfs(0):
        return None
    return BlockModel(p, {v.name: values[v.id] for v in phi.vars})
