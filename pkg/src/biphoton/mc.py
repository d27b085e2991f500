"""Seeded Monte Carlo detection runs and their estimators.

Trials draw one outcome each by inverse-CDF from the analytic distribution.
Uniforms come from numpy's Philox4x64 counter-based generator keyed by the
run seed: trial ``k`` always consumes 64-bit word ``k`` of the keyed stream,
so a run split into chunks (and tallied in any order) gives exactly the same
counts as a single pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from . import mzi, rto

GENERATOR = "numpy.random.Philox (Philox4x64-10), one uint64 per trial, 53-bit doubles"
DEFAULT_CHUNK = 1 << 18
_WORDS_PER_BLOCK = 4
MAX_SEED = 2**64 - 1

MZ_LABELS = ("D1", "D2", "absorbed")
RTO_LABELS = rto.PAIR_LABELS


@dataclass(frozen=True)
class RunSpec:
    n_trials: int
    seed: int
    experiment: str
    phases: Union[mzi.MziConfig, rto.RtoPhases]

    def __post_init__(self):
        if int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise ValueError(f"n_trials must be a positive integer, got {self.n_trials!r}")
        if not 0 <= int(self.seed) <= MAX_SEED:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.experiment == "mz":
            if not isinstance(self.phases, mzi.MziConfig):
                raise TypeError("mz runs need an MziConfig")
        elif self.experiment == "rto":
            if not isinstance(self.phases, rto.RtoPhases):
                raise TypeError("rto runs need RtoPhases")
        else:
            raise ValueError(f"unknown experiment {self.experiment!r}")


@dataclass(frozen=True)
class TrialTally:
    counts: Dict[str, int]
    n: int = field(init=False)

    def __post_init__(self):
        counts = {k: int(v) for k, v in self.counts.items()}
        if any(v < 0 for v in counts.values()):
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "n", sum(counts.values()))

    def __getitem__(self, label: str) -> int:
        return self.counts[label]

    def __add__(self, other: "TrialTally") -> "TrialTally":
        if set(self.counts) != set(other.counts):
            raise ValueError("cannot merge tallies over different outcome labels")
        return TrialTally({k: self.counts[k] + other.counts[k] for k in self.counts})

    def to_dict(self) -> dict:
        return {"counts": dict(self.counts), "n": self.n}


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float

    def to_dict(self) -> dict:
        return {"value": self.value, "std_error": self.std_error}


def distribution(spec: RunSpec) -> Tuple[Tuple[str, ...], np.ndarray]:
    """Outcome labels and their analytic probabilities."""
    if spec.experiment == "mz":
        o = mzi.outcome(spec.phases)
        return MZ_LABELS, np.array([o.p_d1, o.p_d2, o.p_absorbed])
    return RTO_LABELS, np.array(rto.coincidence_probabilities(spec.phases).as_tuple())


def uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniform doubles in [0, 1) for trials ``start .. start+count-1``."""
    block, skip = divmod(int(start), _WORDS_PER_BLOCK)
    gen = np.random.Generator(np.random.Philox(key=int(seed), counter=block))
    return gen.random(skip + int(count))[skip:]


def _cdf(p: np.ndarray) -> np.ndarray:
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    cdf = np.cumsum(p) / p.sum()
    cdf[-1] = 1.0
    return cdf


def draw(p: Sequence[float], u: np.ndarray) -> np.ndarray:
    """Inverse-CDF outcome indices; zero-probability outcomes are never chosen."""
    return np.searchsorted(_cdf(p), u, side="right")


def sample_chunk(spec: RunSpec, start: int, count: int, dist=None) -> TrialTally:
    """Tally trials ``start .. start+count-1`` of the run."""
    labels, p = distribution(spec) if dist is None else dist
    idx = draw(p, uniforms(spec.seed, start, count))
    counts = np.bincount(idx, minlength=len(labels))
    return TrialTally(dict(zip(labels, counts.tolist())))


def sample_run(spec: RunSpec, chunk_size: int = DEFAULT_CHUNK) -> TrialTally:
    """Tally of ``spec.n_trials`` seeded trials; identical specs give identical tallies."""
    if chunk_size < 1:
        raise ValueError("chunk_size must be positive")
    dist = distribution(spec)
    starts = range(0, spec.n_trials, chunk_size)
    tallies = [sample_chunk(spec, s, min(chunk_size, spec.n_trials - s), dist) for s in starts]
    return merge(tallies)


def merge(tallies: Iterable[TrialTally]) -> TrialTally:
    tallies = list(tallies)
    if not tallies:
        raise ValueError("nothing to merge")
    total = tallies[0]
    for t in tallies[1:]:
        total = total + t
    return total


def estimate_C(tally: TrialTally) -> Estimate:
    """(n_same - n_different) / n with binomial-style standard error sqrt((1 - C^2)/n)."""
    if tally.n == 0:
        raise ValueError("empty tally")
    same = sum(tally.counts[k] for k in rto.SAME)
    diff = sum(tally.counts[k] for k in rto.DIFFERENT)
    c = (same - diff) / tally.n
    return Estimate(c, float(np.sqrt(max(0.0, 1.0 - c * c) / tally.n)))


def estimate_probability(tally: TrialTally, label: str) -> Estimate:
    if tally.n == 0:
        raise ValueError("empty tally")
    if label not in tally.counts:
        raise KeyError(f"label {label!r} not in tally")
    p = tally.counts[label] / tally.n
    return Estimate(p, float(np.sqrt(p * (1.0 - p) / tally.n)))


def substream_seeds(seed: int, n: int) -> list:
    """``n`` independent 64-bit seeds derived from ``seed``."""
    children = np.random.SeedSequence(int(seed)).spawn(n)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def binomial_se(p: float, n: int) -> float:
    return float(np.sqrt(p * (1.0 - p) / n))


def within_sigma(estimate: float, expected: float, se: float, k: float = 4.0) -> bool:
    """|estimate - expected| <= k*se; with se == 0 only round-off is allowed."""
    if se == 0.0:
        return abs(estimate - expected) <= 1e-12
    return abs(estimate - expected) <= k * se


def run(experiment: str, phases, n_trials: int, seed: int,
        chunk_size: Optional[int] = None) -> TrialTally:
    spec = RunSpec(n_trials, seed, experiment, phases)
    return sample_run(spec, chunk_size or DEFAULT_CHUNK)
