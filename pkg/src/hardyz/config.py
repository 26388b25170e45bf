"""Shared evaluation configuration.

A single frozen dataclass travels through every numeric operation so that a
run is reproducible from its parameters alone.  The config is hashable; the
CLI derives its manifest hash from it.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json

# Fast-path switchover: below this t the Riemann-Siegel expansion is not
# trusted and evaluation falls back to Euler-Maclaurin.
RS_MIN_T = 200.0

# Hard floor for any critical-line evaluation.  The first zeta zero sits at
# 14.13; scans that must start below it (full-interval averages) use this
# floor rather than EvalConfig.t_min, which bounds the asymptotic regime.
T_FLOOR = 4.0


@dataclasses.dataclass(frozen=True)
class EvalConfig:
    """Accuracy and range envelope for all evaluators.

    target_rel_error: requested relative accuracy of oracle-path values.
    em_max_terms: cap on the Euler-Maclaurin main-sum length (memory/time guard).
    rs_correction_terms: Riemann-Siegel correction depth d, terms C_0..C_d.
    t_min: floor of the asymptotic validity envelope for fast paths.
    t_max: ceiling imposed by double-precision phase accuracy.
    """

    target_rel_error: float = 1e-10
    em_max_terms: int = 50_000_000
    rs_correction_terms: int = 1
    t_min: float = 50.0
    t_max: float = 1e8

    def __post_init__(self) -> None:
        if not (0.0 < self.target_rel_error < 1e-3):
            raise ValueError("target_rel_error must lie in (0, 1e-3)")
        if self.em_max_terms < 100:
            raise ValueError("em_max_terms too small to be useful")
        if self.rs_correction_terms not in (0, 1, 2):
            raise ValueError("rs_correction_terms must be 0, 1 or 2")
        if self.t_min < 50.0:
            raise ValueError("t_min must be >= 50")
        if self.t_max <= self.t_min:
            raise ValueError("t_max must exceed t_min")

    def digest(self) -> str:
        """Stable short hash of the configuration, for run manifests."""
        payload = json.dumps(dataclasses.asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


DEFAULT_CONFIG = EvalConfig()
