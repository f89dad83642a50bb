"""Published moment sequences of two real BFS-sampled networks with their reported bounds."""
from __future__ import annotations

import time
from dataclasses import dataclass

from .bounds import lower_bound_beta, upper_bound_delta
from .moments import MomentSequence


@dataclass(frozen=True)
class MomentFixture:
    name: str
    n: int
    moments: tuple[float, ...]
    beta: float
    delta: float
    lambda1: float
    rel_tol: float = 0.01

    def sequence(self) -> MomentSequence:
        return MomentSequence(self.moments, self.n, "external", None, True)


ENRON = MomentFixture(
    "enron", 3215, (1.0, 0.0, 22.47, 394.7, 33491.0, 2603200.0), beta=78.53, delta=98.74, lambda1=95.18
)
AS_SKITTER = MomentFixture(
    "as-skitter", 2248, (1.0, 0.0, 18.37, 341.1, 40001.0, 2777018.0), beta=74.72, delta=93.94, lambda1=91.3
)
FIXTURES = (ENRON, AS_SKITTER)


def run_fixture(fx: MomentFixture, r: int = 2) -> dict:
    """Recompute both bounds; relative tolerance absorbs the 4-digit rounding of the published moments."""
    t0 = time.perf_counter()
    m = fx.sequence()
    beta = lower_bound_beta(m, r)
    delta = upper_bound_delta(m, r)
    elapsed = time.perf_counter() - t0
    beta_ok = abs(beta - fx.beta) <= fx.rel_tol * fx.beta
    delta_ok = abs(delta - fx.delta) <= fx.rel_tol * fx.delta
    return {
        "name": fx.name,
        "beta": beta,
        "beta_expected": fx.beta,
        "delta": delta,
        "delta_expected": fx.delta,
        "seconds": elapsed,
        "pass": bool(beta_ok and delta_ok),
    }
