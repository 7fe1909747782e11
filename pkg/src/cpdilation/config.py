"""Numerical tolerances.

Precedence for the CLI is flag > environment > default. Library functions take
explicit ``tol`` arguments and fall back to the defaults below.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

TOL_RANK = 1e-9
TOL_EQ = 1e-8

ENV_PREFIX = "CPDILATION_"


@dataclass(frozen=True)
class Tolerances:
    rank: float = TOL_RANK
    eq: float = TOL_EQ

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        environ = os.environ if environ is None else environ
        rank = float(environ.get(ENV_PREFIX + "TOL_RANK", TOL_RANK))
        eq = float(environ.get(ENV_PREFIX + "TOL_EQ", TOL_EQ))
        return cls(rank=rank, eq=eq)

    def override(self, rank: float | None = None, eq: float | None = None) -> "Tolerances":
        return Tolerances(
            rank=self.rank if rank is None else rank,
            eq=self.eq if eq is None else eq,
        )
