"""Small dense complex linear algebra for one- and two-photon mode spaces.

States live on a :class:`ModeBasis`, an ordered tuple of mode labels. A
single photon has two path modes (``A1``, ``A2``); the biphoton lives on the
A-major product basis ``A1B1, A1B2, A2B1, A2B2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

NORM_ATOL = 1e-12
UNITARY_ATOL = 1e-12
EIGEN_FLOOR = -1e-10


class BasisError(ValueError):
    """Raised when two objects do not share (or cannot share) a basis."""


class BasisConflictError(BasisError):
    """Raised when a tensor product is attempted over overlapping labels."""


class NormalizationError(ValueError):
    """Raised when a state or density matrix is not normalized."""


@dataclass(frozen=True)
class ModeBasis:
    """Ordered orthonormal mode labels.

    ``name`` identifies a single subsystem (``"A"`` or ``"B"``). A composite
    basis carries its factors in ``parts`` and has ``name`` equal to the
    concatenated factor names.
    """

    labels: Tuple[str, ...]
    name: str = ""
    parts: Tuple["ModeBasis", ...] = field(default=(), compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise BasisError("basis must contain at least one label")
        if any(not label for label in labels):
            raise BasisError("basis labels must be non-empty")
        if len(set(labels)) != len(labels):
            raise BasisError(f"duplicate labels in basis {labels}")

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def is_composite(self) -> bool:
        return len(self.parts) > 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise BasisError(f"label {label!r} not in basis {self.labels}") from None

    def part(self, name: str) -> "ModeBasis":
        for p in self.parts:
            if p.name == name:
                return p
        raise BasisError(f"basis {self.name!r} has no subsystem {name!r}")

    def __len__(self):
        return len(self.labels)


def mode_basis(name: str, n_modes: int = 2) -> ModeBasis:
    """Single-photon path basis ``name1 .. nameN`` for subsystem ``name``."""
    return ModeBasis(tuple(f"{name}{k}" for k in range(1, n_modes + 1)), name=name)


def product_basis(a: ModeBasis, b: ModeBasis) -> ModeBasis:
    """A-major product of two disjoint bases."""
    overlap = set(a.labels) & set(b.labels)
    if overlap or (a.name and a.name == b.name):
        raise BasisConflictError(
            f"cannot form product of overlapping bases {a.labels} and {b.labels}"
        )
    labels = tuple(la + lb for la in a.labels for lb in b.labels)
    parts = (a.parts or (a,)) + (b.parts or (b,))
    return ModeBasis(labels, name=a.name + b.name, parts=parts)


A_BASIS = mode_basis("A")
B_BASIS = mode_basis("B")
AB_BASIS = product_basis(A_BASIS, B_BASIS)


def _as_complex_vector(values, dim: int) -> np.ndarray:
    vec = np.array(values, dtype=np.complex128).reshape(-1)
    if vec.shape != (dim,):
        raise BasisError(f"expected {dim} amplitudes, got {vec.size}")
    return vec


class StateVector:
    """Normalized pure state over a :class:`ModeBasis`.

    The constructor rejects unnormalized amplitudes; use
    :meth:`StateVector.normalized` to rescale explicitly.
    """

    __slots__ = ("basis", "amplitudes")

    def __init__(self, basis: ModeBasis, amplitudes: Sequence[complex]):
        vec = _as_complex_vector(amplitudes, basis.dim)
        norm2 = float(np.vdot(vec, vec).real)
        if abs(norm2 - 1.0) > NORM_ATOL:
            raise NormalizationError(f"state norm^2 is {norm2!r}, expected 1")
        vec.setflags(write=False)
        self.basis = basis
        self.amplitudes = vec

    @classmethod
    def normalized(cls, basis: ModeBasis, amplitudes: Sequence[complex]) -> "StateVector":
        vec = _as_complex_vector(amplitudes, basis.dim)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise NormalizationError("cannot normalize the zero vector")
        return cls(basis, vec / norm)

    @classmethod
    def basis_state(cls, basis: ModeBasis, label: str) -> "StateVector":
        vec = np.zeros(basis.dim, dtype=np.complex128)
        vec[basis.index(label)] = 1.0
        return cls(basis, vec)

    @classmethod
    def from_mapping(cls, basis: ModeBasis, amps: Mapping[str, complex]) -> "StateVector":
        vec = np.zeros(basis.dim, dtype=np.complex128)
        for label, amp in amps.items():
            vec[basis.index(label)] = amp
        return cls(basis, vec)

    def __getitem__(self, label: str) -> complex:
        return complex(self.amplitudes[self.basis.index(label)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def allclose(self, other: "StateVector", atol: float = NORM_ATOL) -> bool:
        return self.basis == other.basis and np.allclose(
            self.amplitudes, other.amplitudes, rtol=0, atol=atol
        )

    def __repr__(self):
        terms = ", ".join(
            f"{lab}: {amp:.6g}" for lab, amp in zip(self.basis.labels, self.amplitudes)
        )
        return f"StateVector({{{terms}}})"


class Operator:
    """Square complex matrix acting on a mode basis.

    Passing ``unitary=True`` asserts U^dagger U = I to within 1e-12 per entry.
    """

    __slots__ = ("basis", "matrix", "unitary")

    def __init__(self, basis: ModeBasis, matrix, unitary: bool = False):
        mat = np.array(matrix, dtype=np.complex128)
        if mat.shape != (basis.dim, basis.dim):
            raise BasisError(
                f"operator shape {mat.shape} does not match basis dimension {basis.dim}"
            )
        if unitary:
            err = unitarity_error(mat)
            if err > UNITARY_ATOL:
                raise ValueError(f"matrix flagged unitary but |U^dag U - I| = {err:.3g}")
        mat.setflags(write=False)
        self.basis = basis
        self.matrix = mat
        self.unitary = bool(unitary)

    @classmethod
    def identity(cls, basis: ModeBasis) -> "Operator":
        return cls(basis, np.eye(basis.dim), unitary=True)

    def dagger(self) -> "Operator":
        return Operator(self.basis, self.matrix.conj().T, unitary=self.unitary)

    def __matmul__(self, other: "Operator") -> "Operator":
        if not isinstance(other, Operator):
            return NotImplemented
        if other.basis != self.basis:
            raise BasisError("operator bases differ")
        return Operator(
            self.basis, self.matrix @ other.matrix, unitary=self.unitary and other.unitary
        )

    def allclose(self, other: "Operator", atol: float = UNITARY_ATOL) -> bool:
        return self.basis == other.basis and np.allclose(
            self.matrix, other.matrix, rtol=0, atol=atol
        )

    def __repr__(self):
        return f"Operator(basis={self.basis.labels}, unitary={self.unitary})"


def unitarity_error(matrix: np.ndarray) -> float:
    """Max-entry deviation of U^dagger U from the identity."""
    m = np.asarray(matrix)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix over a basis."""

    __slots__ = ("basis", "matrix")

    def __init__(self, basis: ModeBasis, matrix):
        mat = np.array(matrix, dtype=np.complex128)
        if mat.shape != (basis.dim, basis.dim):
            raise BasisError(
                f"density matrix shape {mat.shape} does not match basis dimension {basis.dim}"
            )
        if np.max(np.abs(mat - mat.conj().T)) > NORM_ATOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(mat)
        if abs(tr - 1.0) > NORM_ATOL:
            raise NormalizationError(f"density matrix trace is {tr!r}, expected 1")
        if np.min(np.linalg.eigvalsh(mat)) < EIGEN_FLOOR:
            raise ValueError("density matrix has a negative eigenvalue")
        mat.setflags(write=False)
        self.basis = basis
        self.matrix = mat

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def diagonal(self) -> dict:
        return {lab: float(p.real) for lab, p in zip(self.basis.labels, np.diag(self.matrix))}

    def __repr__(self):
        return f"DensityMatrix(basis={self.basis.labels}, purity={self.purity:.6g})"


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Product state ``a (x) b`` in A-major order."""
    basis = product_basis(a.basis, b.basis)
    return StateVector(basis, np.kron(a.amplitudes, b.amplitudes))


def apply(op: Operator, s: StateVector) -> StateVector:
    """Act with ``op`` on ``s``.

    Non-unitary operators may produce an unnormalized vector, which the
    :class:`StateVector` constructor refuses; project such results with
    plain numpy instead.
    """
    if op.basis != s.basis:
        raise BasisError(f"operator basis {op.basis.labels} != state basis {s.basis.labels}")
    return StateVector(s.basis, op.matrix @ s.amplitudes)


def density_from_pure(s: StateVector) -> DensityMatrix:
    """Projector ``|s><s|``."""
    if abs(s.norm() - 1.0) > NORM_ATOL:
        raise NormalizationError("density_from_pure needs a normalized state")
    return DensityMatrix(s.basis, np.outer(s.amplitudes, s.amplitudes.conj()))


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Reduced density matrix of subsystem ``keep`` of a bipartite state."""
    basis = rho.basis
    if not basis.is_composite or len(basis.parts) != 2:
        raise BasisError("partial_trace needs a bipartite composite basis")
    first, second = basis.parts
    kept = basis.part(keep)
    t = rho.matrix.reshape(first.dim, second.dim, first.dim, second.dim)
    if kept is first:
        reduced = np.einsum("ijkj->ik", t)
    else:
        reduced = np.einsum("ijil->jl", t)
    return DensityMatrix(kept, reduced)


def probabilities(s: StateVector) -> dict:
    """Born-rule probability for every label of the basis."""
    p = np.abs(s.amplitudes) ** 2
    return {label: float(v) for label, v in zip(s.basis.labels, p)}


def purity(rho: DensityMatrix) -> float:
    return rho.purity


def random_state(basis: ModeBasis, rng: Optional[np.random.Generator] = None) -> StateVector:
    """Haar-ish random pure state (normalized complex Gaussian)."""
    rng = np.random.default_rng() if rng is None else rng
    vec = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    return StateVector.normalized(basis, vec)
