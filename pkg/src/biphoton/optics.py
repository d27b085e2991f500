"""Unitary optical elements: 50-50 beam splitters, phase shifters, mirrors.

Beam splitters use the symmetric convention, transmission 1/sqrt(2) and
reflection i/sqrt(2), so every layout-dependent phase is a phase shifter
or a mirror rather than a hidden sign in the splitter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .qcore import (
    A_BASIS,
    B_BASIS,
    BasisError,
    ModeBasis,
    Operator,
    product_basis,
)

TWO_PI = 2.0 * np.pi
DEFAULT_MIRROR_PHASE = np.pi / 2
PHASE_ATOL = 1e-9

_STANDARD_BASES = {"A": A_BASIS, "B": B_BASIS}


def wrap_phase(phi: float) -> float:
    """Map an angle into [0, 2pi)."""
    w = float(np.mod(phi, TWO_PI))
    # np.mod can round a tiny negative input up to exactly 2pi
    return 0.0 if w >= TWO_PI else w


def phase_distance(a: float, b: float) -> float:
    """Distance between two angles on the circle, in [0, pi]."""
    d = wrap_phase(a - b)
    return min(d, TWO_PI - d)


def _basis_of_label(label: str) -> ModeBasis:
    for basis in _STANDARD_BASES.values():
        if label in basis.labels:
            return basis
    raise BasisError(f"cannot infer a basis for mode label {label!r}")


def beam_splitter(basis: ModeBasis = A_BASIS) -> Operator:
    """Symmetric 50-50 beam splitter on a two-mode basis."""
    if basis.dim != 2:
        raise BasisError("beam splitter acts on exactly two modes")
    s = 1.0 / np.sqrt(2.0)
    return Operator(basis, [[s, 1j * s], [1j * s, s]], unitary=True)


def phase_shifter(phi: float, target: str, basis: Optional[ModeBasis] = None) -> Operator:
    """Multiply the amplitude on ``target`` by exp(i*phi)."""
    basis = _basis_of_label(target) if basis is None else basis
    diag = np.ones(basis.dim, dtype=np.complex128)
    diag[basis.index(target)] = np.exp(1j * wrap_phase(phi))
    return Operator(basis, np.diag(diag), unitary=True)


def mirror(basis: ModeBasis = A_BASIS, phase: float = DEFAULT_MIRROR_PHASE) -> Operator:
    """Global phase exp(i*phase); probabilities are untouched."""
    return Operator(basis, np.exp(1j * wrap_phase(phase)) * np.eye(basis.dim), unitary=True)


def lift(op: Operator, subsystem: str, partner: Optional[ModeBasis] = None) -> Operator:
    """Embed a single-subsystem operator into the A-major biphoton space.

    ``subsystem`` is ``"A"`` (first factor) or ``"B"`` (second factor);
    ``partner`` is the untouched factor and defaults to the standard basis
    of the other station.
    """
    if subsystem not in ("A", "B"):
        raise BasisError(f"unknown subsystem {subsystem!r}; expected 'A' or 'B'")
    if op.basis.name != subsystem:
        raise BasisError(
            f"operator acts on {op.basis.name!r}, cannot lift onto subsystem {subsystem!r}"
        )
    if subsystem == "A":
        other = B_BASIS if partner is None else partner
        basis = product_basis(op.basis, other)
        mat = np.kron(op.matrix, np.eye(other.dim))
    else:
        other = A_BASIS if partner is None else partner
        basis = product_basis(other, op.basis)
        mat = np.kron(np.eye(other.dim), op.matrix)
    return Operator(basis, mat, unitary=op.unitary)


def compose(ops: Sequence[Operator]) -> Operator:
    """Matrix product ``ops[0] @ ops[1] @ ... @ ops[-1]``.

    Written like function composition: the last element acts on the state
    first, so a Mach-Zehnder reads ``compose([bs2, ps2, ps1, bs1])``.
    """
    ops = list(ops)
    if not ops:
        raise ValueError("compose needs at least one operator")
    basis = ops[0].basis
    for op in ops[1:]:
        if op.basis != basis:
            raise BasisError("compose needs operators over a common basis")
    mat = np.eye(basis.dim, dtype=np.complex128)
    for op in ops:
        mat = mat @ op.matrix
    unitary = all(op.unitary for op in ops)
    return Operator(basis, mat, unitary=unitary)


@dataclass(frozen=True)
class ElementSpec:
    """Declarative description of one optical element."""

    kind: str
    phase: Optional[float] = None
    target_mode: Optional[str] = None
    basis: Optional[ModeBasis] = None

    def __post_init__(self):
        if self.kind not in ("beam_splitter", "phase_shifter", "mirror"):
            raise ValueError(f"unknown element kind {self.kind!r}")
        if self.kind == "phase_shifter" and self.target_mode is None:
            raise ValueError("phase_shifter needs a target_mode")
        if self.phase is None:
            default = DEFAULT_MIRROR_PHASE if self.kind == "mirror" else 0.0
            object.__setattr__(self, "phase", default)
        object.__setattr__(self, "phase", wrap_phase(self.phase))

    def to_operator(self) -> Operator:
        if self.kind == "phase_shifter":
            return phase_shifter(self.phase, self.target_mode, self.basis)
        basis = A_BASIS if self.basis is None else self.basis
        if self.kind == "beam_splitter":
            return beam_splitter(basis)
        return mirror(basis, self.phase)


def build(elements: Sequence[ElementSpec]) -> Operator:
    """Compose elements listed in the order the photon meets them."""
    return compose([e.to_operator() for e in reversed(list(elements))])
