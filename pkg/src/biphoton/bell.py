"""CHSH test on the entangled-pair interferometer.

The correlation function is the degree of correlation C(phi_a, phi_b) of the
calibrated layout, E(a, b) = cos(b - a), and

    S = E(a1, b1) - E(a1, b2) + E(a2, b1) + E(a2, b2).

Local deterministic strategies reach at most |S| = 2; the entangled pair
reaches 2*sqrt(2) at the settings in :data:`OPTIMAL`.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import mc, rto

CLASSICAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * np.sqrt(2.0)


@dataclass(frozen=True)
class ChshSettings:
    """Two phase settings per station, in radians."""

    a1: float
    a2: float
    b1: float
    b2: float

    @property
    def is_degenerate(self) -> bool:
        """True if a station uses the same phase for both of its settings."""
        return np.isclose(self.a1, self.a2) or np.isclose(self.b1, self.b2)

    def pairs(self):
        """The four (a, b, sign) terms of S."""
        return (
            (self.a1, self.b1, +1),
            (self.a1, self.b2, -1),
            (self.a2, self.b1, +1),
            (self.a2, self.b2, +1),
        )

    def to_dict(self) -> dict:
        return asdict(self)


OPTIMAL = ChshSettings(0.0, np.pi / 2, np.pi / 4, 3 * np.pi / 4)


@dataclass(frozen=True)
class ChshResult:
    S_hat: float
    sigma_S: float
    n_sigmas_violation: float


def correlation_function(a: float, b: float, fixed=rto.DEFAULT_FIXED) -> float:
    return rto.correlation(rto.RtoPhases(a, b, fixed)).C


def chsh_S(settings: ChshSettings, fixed=rto.DEFAULT_FIXED) -> float:
    """Analytic S from the interferometer's correlation function."""
    return float(sum(sign * correlation_function(a, b, fixed) for a, b, sign in settings.pairs()))


def chsh_mc(settings: ChshSettings, n_per_setting: int, seed: int,
            fixed=rto.DEFAULT_FIXED) -> ChshResult:
    """Estimate S from four independent seeded runs, one per setting pair.

    sigma_S adds the four standard errors of C in quadrature; the violation
    significance is (S_hat - 2) / sigma_S (infinite when sigma_S is 0 and
    S_hat exceeds the bound).
    """
    if n_per_setting < 1:
        raise ValueError("n_per_setting must be at least 1")
    seeds = mc.substream_seeds(seed, 4)
    s_hat = 0.0
    var = 0.0
    for (a, b, sign), sub in zip(settings.pairs(), seeds):
        tally = mc.run("rto", rto.RtoPhases(a, b, fixed), n_per_setting, sub)
        est = mc.estimate_C(tally)
        s_hat += sign * est.value
        var += est.std_error ** 2
    sigma = float(np.sqrt(var))
    excess = s_hat - CLASSICAL_BOUND
    if sigma > 0:
        n_sig = excess / sigma
    else:
        n_sig = np.inf if excess > 0 else (0.0 if excess == 0 else -np.inf)
    return ChshResult(float(s_hat), sigma, float(n_sig))


def deterministic_strategies():
    """All 16 local deterministic strategies as (x(a1), x(a2), y(b1), y(b2)) in {-1, +1}."""
    return list(itertools.product((-1, 1), repeat=4))


def local_S(strategy) -> int:
    x1, x2, y1, y2 = strategy
    return x1 * y1 - x1 * y2 + x2 * y1 + x2 * y2


def max_local_S() -> int:
    """Largest |S| attainable by any local deterministic strategy (exact integer)."""
    return max(abs(local_S(s)) for s in deterministic_strategies())


def max_S_search(n_grid: int = 8, fixed=rto.DEFAULT_FIXED) -> tuple:
    """Coarse search for the settings maximizing S; a1 is pinned to 0.

    S depends only on phase differences, so fixing a1 loses nothing.
    """
    grid = np.linspace(0.0, 2.0 * np.pi, n_grid, endpoint=False)
    best: Optional[ChshSettings] = None
    best_s = -np.inf
    cache = {}

    def corr(a, b):
        key = (a, b)
        if key not in cache:
            cache[key] = correlation_function(a, b, fixed)
        return cache[key]

    for a2, b1, b2 in itertools.product(grid, repeat=3):
        st = ChshSettings(0.0, a2, b1, b2)
        s = sum(sign * corr(a, b) for a, b, sign in st.pairs())
        if s > best_s:
            best, best_s = st, s
    return best, float(best_s)
