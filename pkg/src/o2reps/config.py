"""Budgets and caps.  Defaults can be overridden through environment variables."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, replace


class BudgetExceeded(RuntimeError):
    """Raised instead of silently truncating an enumeration."""


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    return int(float(raw))


@dataclass(frozen=True)
class Budgets:
    scan: int = 5_000_000  # matrices scanned when building C(O_1) or counting kernels
    enumerate: int = 5_000_000  # |C(O_2)| for full enumeration
    orbit_group: int = 100_000  # |C(O_1)| acted on by the orbit engine
    oracle: int = 100_000  # |G| for Dixon-Schneider
    max_q: int = 9
    search: int = 1_000_000  # candidate exponent vectors in the extension search

    @classmethod
    def from_env(cls) -> "Budgets":
        d = cls()
        return cls(
            scan=_env_int("O2REPS_SCAN_BUDGET", d.scan),
            enumerate=_env_int("O2REPS_ENUM_BUDGET", d.enumerate),
            orbit_group=_env_int("O2REPS_ORBIT_BUDGET", d.orbit_group),
            oracle=_env_int("O2REPS_ORACLE_BUDGET", d.oracle),
            max_q=_env_int("O2REPS_MAX_Q", d.max_q),
            search=_env_int("O2REPS_SEARCH_BUDGET", d.search),
        )

    def as_dict(self) -> dict:
        return asdict(self)

    def updated(self, **kw) -> "Budgets":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


BUDGETS = Budgets.from_env()
