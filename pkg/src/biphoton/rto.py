"""Momentum-entangled photon pair sent into two separated interferometers.

Layout. The source emits (|A1>|B1> + |A2>|B2>)/sqrt(2): index 1 is the
"solid" beam pair, index 2 the "dashed" pair. Each of the four beams carries
a fixed layout phase, ``phi_w`` on A1, ``phi_x`` on B1, ``phi_y`` on A2 and
``phi_z`` on B2, and reflects off one mirror. The adjustable shifter of
station A sits on beam A2 and that of station B on beam B1. Each station then
recombines its two beams on a 50-50 splitter whose output ports feed
detectors A1/A2 (B1/B2), labelled by the mode index of the transmitted beam.

Everything is computed by pushing the state through the operator chain; the
cosine formulas in :func:`closed_form_coincidences` exist to be checked
against it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from . import optics
from .optics import (
    DEFAULT_MIRROR_PHASE,
    PHASE_ATOL,
    beam_splitter,
    compose,
    lift,
    mirror,
    phase_shifter,
    wrap_phase,
)
from .qcore import (
    A_BASIS,
    AB_BASIS,
    B_BASIS,
    Operator,
    StateVector,
    apply,
    density_from_pure,
    partial_trace,
)

# phi_w + phi_x - phi_y - phi_z = pi puts perfect correlation at zero phase difference
DEFAULT_FIXED = (np.pi, 0.0, 0.0, 0.0)

PAIR_LABELS = ("A1B1", "A1B2", "A2B1", "A2B2")
SAME = ("A1B1", "A2B2")
DIFFERENT = ("A1B2", "A2B1")


class FitError(RuntimeError):
    """Raised when the coincidence curves are not of the expected cosine form."""


@dataclass(frozen=True)
class RtoPhases:
    """Station phases plus the fixed layout phases (phi_w, phi_x, phi_y, phi_z)."""

    phi_a: float = 0.0
    phi_b: float = 0.0
    fixed: Tuple[float, float, float, float] = DEFAULT_FIXED
    mirror_phase: float = DEFAULT_MIRROR_PHASE

    def __post_init__(self):
        fixed = tuple(float(f) for f in self.fixed)
        if len(fixed) != 4:
            raise ValueError("fixed layout needs four phases (phi_w, phi_x, phi_y, phi_z)")
        object.__setattr__(self, "fixed", tuple(wrap_phase(f) for f in fixed))
        object.__setattr__(self, "phi_a", wrap_phase(self.phi_a))
        object.__setattr__(self, "phi_b", wrap_phase(self.phi_b))
        object.__setattr__(self, "mirror_phase", wrap_phase(self.mirror_phase))

    @property
    def dphi(self) -> float:
        return wrap_phase(self.phi_b - self.phi_a)

    def with_stations(self, phi_a: float, phi_b: float) -> "RtoPhases":
        return RtoPhases(phi_a, phi_b, self.fixed, self.mirror_phase)


@dataclass(frozen=True)
class CoincidenceDist:
    p11: float
    p12: float
    p21: float
    p22: float

    def as_tuple(self) -> tuple:
        return (self.p11, self.p12, self.p21, self.p22)

    def as_dict(self) -> dict:
        return dict(zip(PAIR_LABELS, self.as_tuple()))

    @property
    def total(self) -> float:
        return sum(self.as_tuple())


@dataclass(frozen=True)
class Correlation:
    p_same: float
    p_different: float
    C: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "C", self.p_same - self.p_different)


def prepare_entangled() -> StateVector:
    s = 1.0 / np.sqrt(2.0)
    return StateVector.from_mapping(AB_BASIS, {"A1B1": s, "A2B2": s})


def layout_operator(fixed=DEFAULT_FIXED, mirror_phase: float = DEFAULT_MIRROR_PHASE) -> Operator:
    """Fixed beam phases and mirrors, i.e. everything before the station shifters."""
    w, x, y, z = fixed
    return compose([
        lift(mirror(B_BASIS, mirror_phase), "B"),
        lift(mirror(A_BASIS, mirror_phase), "A"),
        lift(phase_shifter(z, "B2"), "B"),
        lift(phase_shifter(x, "B1"), "B"),
        lift(phase_shifter(y, "A2"), "A"),
        lift(phase_shifter(w, "A1"), "A"),
    ])


def station_shifters(phi_a: float, phi_b: float) -> Operator:
    return compose([
        lift(phase_shifter(phi_b, "B1"), "B"),
        lift(phase_shifter(phi_a, "A2"), "A"),
    ])


def splitters() -> Operator:
    return compose([lift(beam_splitter(B_BASIS), "B"), lift(beam_splitter(A_BASIS), "A")])


def pipeline(ph: RtoPhases) -> Operator:
    """Full biphoton operator: layout, then station shifters, then splitters."""
    return compose([
        splitters(),
        station_shifters(ph.phi_a, ph.phi_b),
        layout_operator(ph.fixed, ph.mirror_phase),
    ])


def output_state(ph: RtoPhases) -> StateVector:
    """Biphoton state at the four detector pairs."""
    return apply(pipeline(ph), prepare_entangled())


def nonlocal_amplitude(i: int, j: int, ph: RtoPhases) -> complex:
    """Amplitude for the coincidence (Ai, Bj)."""
    if i not in (1, 2) or j not in (1, 2):
        raise ValueError("detector indices must be 1 or 2")
    return output_state(ph)[f"A{i}B{j}"]


def coincidence_probabilities(ph: RtoPhases) -> CoincidenceDist:
    p = np.abs(output_state(ph).amplitudes) ** 2
    return CoincidenceDist(*(float(v) for v in p))


def coincidence_grid(phi_a, phi_b, fixed=DEFAULT_FIXED,
                     mirror_phase: float = DEFAULT_MIRROR_PHASE) -> np.ndarray:
    """Coincidence probabilities on the outer grid of station phases.

    Returns an array of shape (len(phi_a), len(phi_b), 4) in A-major pair
    order. The station shifters are diagonal, so each grid point is the
    splitter matrix applied to the elementwise product of the two lifted
    shifter diagonals with the prepared state.
    """
    phi_a = np.atleast_1d(np.asarray(phi_a, dtype=float))
    phi_b = np.atleast_1d(np.asarray(phi_b, dtype=float))
    v = apply(layout_operator(fixed, mirror_phase), prepare_entangled()).amplitudes
    da = np.array([np.diag(lift(phase_shifter(p, "A2"), "A").matrix) for p in phi_a])
    db = np.array([np.diag(lift(phase_shifter(p, "B1"), "B").matrix) for p in phi_b])
    pre = da[:, None, :] * db[None, :, :] * v
    amps = np.einsum("kl,abl->abk", splitters().matrix, pre)
    return np.abs(amps) ** 2


def marginals(ph: RtoPhases) -> dict:
    """Single-detector probabilities obtained by summing over the partner."""
    p11, p12, p21, p22 = coincidence_probabilities(ph).as_tuple()
    return {"A1": p11 + p12, "A2": p21 + p22, "B1": p11 + p21, "B2": p12 + p22}


def reduced_states(ph: RtoPhases) -> dict:
    """Reduced density matrices of each station at the detectors."""
    rho = density_from_pure(output_state(ph))
    return {"A": partial_trace(rho, "A"), "B": partial_trace(rho, "B")}


def correlation(ph: RtoPhases) -> Correlation:
    """P(same), P(different) and their difference C.

    For the calibrated default layout C = cos(phi_b - phi_a); in general
    C = cos(phi_b - phi_a + phi_u).
    """
    d = coincidence_probabilities(ph).as_dict()
    return Correlation(
        p_same=sum(d[k] for k in SAME),
        p_different=sum(d[k] for k in DIFFERENT),
    )


def _offset_from_probes(p0: float, p90: float) -> float:
    # p(delta) = [1 + cos(delta + off)] / 4 => cos(off) = 4 p0 - 1, sin(off) = 1 - 4 p90
    return wrap_phase(np.arctan2(1.0 - 4.0 * p90, 4.0 * p0 - 1.0))


def derive_fixed(ph: RtoPhases) -> Tuple[float, float]:
    """Fixed offsets (phi_u, phi_v) of the (A1,B1) and (A1,B2) coincidence curves.

    Probes the pipeline at phi_a = 0 with phi_b = 0 and pi/2, which fixes the
    offset through its cosine and sine, and checks the result at phi_b = pi/4.
    """
    probes = {
        b: coincidence_probabilities(ph.with_stations(0.0, b))
        for b in (0.0, np.pi / 2, np.pi / 4)
    }
    phi_u = _offset_from_probes(probes[0.0].p11, probes[np.pi / 2].p11)
    phi_v = _offset_from_probes(probes[0.0].p12, probes[np.pi / 2].p12)
    check = probes[np.pi / 4]
    for off, measured in ((phi_u, check.p11), (phi_v, check.p12)):
        predicted = (1.0 + np.cos(np.pi / 4 + off)) / 4.0
        if abs(predicted - measured) > PHASE_ATOL:
            raise FitError(
                f"coincidence curve is not [1 + cos(dphi + const)]/4: "
                f"predicted {predicted!r}, got {measured!r}"
            )
    return phi_u, phi_v


def closed_form_coincidences(dphi, phi_u: float = 0.0, phi_v: float = np.pi) -> np.ndarray:
    """(p11, p12, p21, p22) from the cosine formulas; broadcasts over ``dphi``."""
    dphi = np.asarray(dphi, dtype=float)
    same = (1.0 + np.cos(dphi + phi_u)) / 4.0
    diff = (1.0 + np.cos(dphi + phi_v)) / 4.0
    return np.stack([same, diff, diff, same], axis=-1)


def closed_form_correlation(dphi) -> tuple:
    """(p_same, p_different, C) for the calibrated layout."""
    c = np.cos(np.asarray(dphi, dtype=float))
    return (1.0 + c) / 2.0, (1.0 - c) / 2.0, c


def random_layout(rng: np.random.Generator) -> RtoPhases:
    """Random fixed phases and mirror phase, station phases at zero."""
    fixed = tuple(rng.uniform(0.0, optics.TWO_PI, size=4))
    return RtoPhases(0.0, 0.0, fixed, float(rng.uniform(0.0, optics.TWO_PI)))
