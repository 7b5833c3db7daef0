"""Capability limits shared by the brute-force components."""

from __future__ import annotations

import os
from dataclasses import dataclass

ENV_ORACLE_CAP = "SETCSP_ORACLE_CAP"


class CapExceeded(Exception):
    """A brute-force search was refused because its input exceeds a configured cap."""


@dataclass(frozen=True)
class Limits:
    oracle_vars: int = 4
    atom_budget: int = 1
    point_budget: int = 1 << 22
    pair_budget: int = 1 << 22

    @classmethod
    def from_env(cls) -> "Limits":
        raw = os.environ.get(ENV_ORACLE_CAP)
        if raw is None:
            return cls()
        try:
            cap = int(raw)
        except ValueError:
            raise ValueError(f"{ENV_ORACLE_CAP} must be an integer, got {raw!r}") from None
        if cap < 0:
            raise ValueError(f"{ENV_ORACLE_CAP} must be nonnegative")
        return cls(oracle_vars=cap)


def oracle_cap(cap: int | None = None) -> int:
    return Limits.from_env().oracle_vars if cap is None else cap
