"""Linear-optics simulation of single-photon and entangled two-photon interference."""

__version__ = "0.1.0"

from .qcore import (  # noqa: F401
    A_BASIS,
    AB_BASIS,
    B_BASIS,
    DensityMatrix,
    ModeBasis,
    Operator,
    StateVector,
    apply,
    density_from_pure,
    partial_trace,
    probabilities,
    tensor,
)
