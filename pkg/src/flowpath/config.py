"""Numerical tolerances shared by the oracle, checkers and CLI."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    conservation: float = 1e-9
    residual: float = 1e-12
    dense_limit: int = 2000
    cg_iter_factor: int = 20
    path_length: float = 1e-12
    condition: float = 1e-9

    def with_overrides(self, **kwargs) -> "Tolerances":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


DEFAULT_TOLERANCES = Tolerances()
