"""Single-photon Mach-Zehnder interferometer.

The photon enters path mode ``A1`` of BS1, picks up ``phi1`` on path 1 and
``phi2`` on path 2, and is recombined at BS2. With the symmetric splitter
convention the output port carrying mode ``A2`` receives the photon with
certainty at zero phase difference; that port is detector D1, port ``A1``
is D2. Hence P(D1) = [1 + cos(phi2 - phi1)] / 2.

Note: the commonly reproduced comparison table lists "71% / 29%" at a
phase difference of pi/4; the Born rule gives 0.854 / 0.146 there (0.71 is
cos(pi/4)). This module computes the Born-rule value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .optics import beam_splitter, compose, phase_shifter, wrap_phase
from .qcore import A_BASIS, StateVector, apply

BLOCK_CHOICES = ("none", "path1", "path2")
DEFAULT_GRID = 64

# detector -> output mode of BS2
DETECTOR_MODES = {"D1": "A2", "D2": "A1"}
PATH_MODES = {"path1": "A1", "path2": "A2"}


@dataclass(frozen=True)
class MziConfig:
    phi1: float = 0.0
    phi2: float = 0.0
    blocked: str = "none"

    def __post_init__(self):
        if self.blocked not in BLOCK_CHOICES:
            raise ValueError(f"blocked must be one of {BLOCK_CHOICES}, got {self.blocked!r}")
        object.__setattr__(self, "phi1", wrap_phase(self.phi1))
        object.__setattr__(self, "phi2", wrap_phase(self.phi2))

    @property
    def dphi(self) -> float:
        return wrap_phase(self.phi2 - self.phi1)


@dataclass(frozen=True)
class MziOutcome:
    p_d1: float
    p_d2: float
    p_absorbed: float = 0.0

    @property
    def p_detected(self) -> float:
        return self.p_d1 + self.p_d2

    @property
    def conditional(self) -> tuple:
        """(P(D1 | detected), P(D2 | detected))."""
        det = self.p_detected
        return (self.p_d1 / det, self.p_d2 / det)

    def as_dict(self) -> dict:
        return {"D1": self.p_d1, "D2": self.p_d2, "absorbed": self.p_absorbed}


def prepare_superposition() -> StateVector:
    """State after BS1 for a photon entering on path 1: (|A1> + i|A2>)/sqrt(2)."""
    return apply(beam_splitter(A_BASIS), StateVector.basis_state(A_BASIS, "A1"))


def interferometer(phi1: float, phi2: float):
    """The BS1 -> PS(phi1) -> PS(phi2) -> BS2 operator."""
    return compose([
        beam_splitter(A_BASIS),
        phase_shifter(phi2, "A2", A_BASIS),
        phase_shifter(phi1, "A1", A_BASIS),
        beam_splitter(A_BASIS),
    ])


def _detector_probs(amplitudes: np.ndarray) -> tuple:
    p = np.abs(amplitudes) ** 2
    return (
        float(p[A_BASIS.index(DETECTOR_MODES["D1"])]),
        float(p[A_BASIS.index(DETECTOR_MODES["D2"])]),
    )


def mz_probabilities(cfg: MziConfig) -> MziOutcome:
    """Detector probabilities with both paths open, from the full operator chain."""
    if cfg.blocked != "none":
        raise ValueError("mz_probabilities models the open interferometer; use mz_blocked")
    out = apply(interferometer(cfg.phi1, cfg.phi2), StateVector.basis_state(A_BASIS, "A1"))
    p_d1, p_d2 = _detector_probs(out.amplitudes)
    return MziOutcome(p_d1, p_d2, 0.0)


def mz_blocked(cfg: MziConfig) -> MziOutcome:
    """Detector probabilities with one path blocked.

    The blocker absorbs the amplitude on its path; the surviving,
    unnormalized amplitude continues through the phase shifters and BS2.
    """
    if cfg.blocked == "none":
        raise ValueError("mz_blocked needs blocked='path1' or 'path2'")
    amps = np.array(prepare_superposition().amplitudes)
    idx = A_BASIS.index(PATH_MODES[cfg.blocked])
    p_absorbed = float(abs(amps[idx]) ** 2)
    amps[idx] = 0.0
    rest = compose([
        beam_splitter(A_BASIS),
        phase_shifter(cfg.phi2, "A2", A_BASIS),
        phase_shifter(cfg.phi1, "A1", A_BASIS),
    ])
    p_d1, p_d2 = _detector_probs(rest.matrix @ amps)
    return MziOutcome(p_d1, p_d2, p_absorbed)


def outcome(cfg: MziConfig) -> MziOutcome:
    return mz_probabilities(cfg) if cfg.blocked == "none" else mz_blocked(cfg)


def closed_form_p_d1(dphi):
    return (1.0 + np.cos(dphi)) / 2.0


def phase_grid(n: int = DEFAULT_GRID, endpoint: bool = False) -> np.ndarray:
    if n < 2:
        raise ValueError("phase grid needs at least 2 points")
    return np.linspace(0.0, 2.0 * np.pi, n, endpoint=endpoint)


def sweep(dphis, blocked: str = "none", phi1: float = 0.0) -> np.ndarray:
    """Rows of (p_d1, p_d2, p_absorbed) for phi2 = phi1 + dphi."""
    rows = [
        outcome(MziConfig(phi1, phi1 + d, blocked)) for d in np.asarray(dphis, dtype=float)
    ]
    return np.array([(o.p_d1, o.p_d2, o.p_absorbed) for o in rows])


def visibility(values) -> float:
    """Fringe visibility (max - min) / (max + min)."""
    v = np.asarray(values, dtype=float)
    hi, lo = v.max(), v.min()
    return float((hi - lo) / (hi + lo)) if hi + lo > 0 else 0.0
