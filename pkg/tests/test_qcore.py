import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from biphoton import optics
from biphoton.qcore import (
    A_BASIS,
    AB_BASIS,
    B_BASIS,
    BasisConflictError,
    BasisError,
    DensityMatrix,
    ModeBasis,
    NormalizationError,
    Operator,
    StateVector,
    apply,
    density_from_pure,
    partial_trace,
    probabilities,
    product_basis,
    random_state,
    tensor,
)

S = 1 / np.sqrt(2)
EQ1 = StateVector(A_BASIS, [S, S])
EQ2 = StateVector(AB_BASIS, [S, 0, 0, S])


def ket(label):
    basis = A_BASIS if label.startswith("A") else B_BASIS
    return StateVector.basis_state(basis, label)


def test_product_basis_is_a_major():
    assert AB_BASIS.labels == ("A1B1", "A1B2", "A2B1", "A2B2")
    assert [p.name for p in AB_BASIS.parts] == ["A", "B"]


@pytest.mark.parametrize("labels", [(), ("A1", "A1"), ("A1", "")])
def test_basis_rejects_bad_labels(labels):
    with pytest.raises(BasisError):
        ModeBasis(labels)


def test_state_constructor_rejects_unnormalized():
    with pytest.raises(NormalizationError):
        StateVector(A_BASIS, [1, 1])
    s = StateVector.normalized(A_BASIS, [1, 1])
    assert s.allclose(EQ1)


def test_tensor_basis_product():
    s = tensor(ket("A1"), ket("B1"))
    assert probabilities(s) == {"A1B1": 1.0, "A1B2": 0.0, "A2B1": 0.0, "A2B2": 0.0}


def test_tensor_distributes():
    s = tensor(EQ1, ket("B1"))
    np.testing.assert_allclose(s.amplitudes, [S, 0, S, 0], atol=1e-15)


def test_tensor_hand_product():
    a = StateVector(A_BASIS, [S, 1j * S])
    b = StateVector(B_BASIS, [S, -S])
    expected = oracles.kron_vec([S, 1j * S], [S, -S])
    np.testing.assert_allclose(tensor(a, b).amplitudes, expected, atol=1e-15)
    np.testing.assert_allclose(tensor(a, b).amplitudes, [0.5, -0.5, 0.5j, -0.5j], atol=1e-15)


def test_tensor_overlapping_labels():
    with pytest.raises(BasisConflictError):
        tensor(EQ1, EQ1)
    with pytest.raises(BasisConflictError):
        product_basis(A_BASIS, A_BASIS)


def test_apply_identity_and_examples():
    assert apply(Operator.identity(A_BASIS), EQ1).allclose(EQ1)
    out = apply(optics.beam_splitter(A_BASIS), ket("A1"))
    np.testing.assert_allclose(out.amplitudes, [S, 1j * S], atol=1e-15)
    flipped = apply(optics.phase_shifter(np.pi, "A2"), EQ1)
    np.testing.assert_allclose(flipped.amplitudes, [S, -S], atol=1e-15)


def test_apply_basis_mismatch():
    with pytest.raises(BasisError):
        apply(optics.beam_splitter(B_BASIS), EQ1)


def test_operator_unitary_flag_is_checked():
    with pytest.raises(ValueError):
        Operator(A_BASIS, [[1, 1], [0, 1]], unitary=True)
    with pytest.raises(BasisError):
        Operator(A_BASIS, np.eye(3))


def test_density_from_pure_examples():
    np.testing.assert_allclose(density_from_pure(ket("A1")).matrix, np.diag([1, 0]))
    np.testing.assert_allclose(density_from_pure(EQ1).matrix, np.full((2, 2), 0.5), atol=1e-15)
    rho = density_from_pure(EQ2)
    np.testing.assert_allclose(rho.matrix, oracles.outer([S, 0, 0, S]), atol=1e-15)
    assert rho.matrix[0, 3] == pytest.approx(0.5)
    assert rho.matrix[3, 0] == pytest.approx(0.5)
    assert abs(rho.purity - 1) < 1e-12


def test_density_matrix_validation():
    with pytest.raises(NormalizationError):
        DensityMatrix(A_BASIS, np.eye(2))
    with pytest.raises(ValueError):
        DensityMatrix(A_BASIS, [[0.5, 0.1], [0.3, 0.5]])
    with pytest.raises(ValueError):
        DensityMatrix(A_BASIS, [[1.5, 0], [0, -0.5]])


def test_partial_trace_product_state():
    rho = density_from_pure(tensor(ket("A1"), ket("B1")))
    np.testing.assert_allclose(partial_trace(rho, "A").matrix, np.diag([1, 0]), atol=1e-15)


@pytest.mark.parametrize("keep", ["A", "B"])
def test_partial_trace_entangled_matches_loops(keep):
    rho = density_from_pure(EQ2)
    red = partial_trace(rho, keep)
    np.testing.assert_allclose(red.matrix, oracles.partial_trace_loops(rho.matrix.tolist(), keep),
                               atol=1e-15)
    np.testing.assert_allclose(red.matrix, 0.5 * np.eye(2), atol=1e-12)
    assert abs(red.purity - 0.5) < 1e-12


def test_partial_trace_needs_composite():
    with pytest.raises(BasisError):
        partial_trace(density_from_pure(EQ1), "A")


def test_probabilities_examples():
    assert probabilities(ket("A1")) == {"A1": 1.0, "A2": 0.0}
    assert probabilities(EQ1) == pytest.approx({"A1": 0.5, "A2": 0.5}, abs=1e-15)
    s = StateVector(AB_BASIS, [0.5, -0.5, 0.5j, -0.5j])
    assert list(probabilities(s).values()) == pytest.approx([0.25] * 4, abs=1e-15)


def test_random_product_partial_trace(rng):
    for _ in range(50):
        a, b = random_state(A_BASIS, rng), random_state(B_BASIS, rng)
        rho = density_from_pure(tensor(a, b))
        np.testing.assert_allclose(partial_trace(rho, "A").matrix,
                                   density_from_pure(a).matrix, atol=1e-12)
        np.testing.assert_allclose(partial_trace(rho, "B").matrix,
                                   density_from_pure(b).matrix, atol=1e-12)


angles = st.floats(min_value=-20, max_value=20, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), angles), min_size=1, max_size=8),
       st.integers(0, 2**32 - 1))
def test_norm_preserved_by_element_chains(steps, seed):
    state = random_state(A_BASIS, np.random.default_rng(seed))
    for kind, phi in steps:
        op = [optics.beam_splitter(A_BASIS),
              optics.phase_shifter(phi, "A2"),
              optics.mirror(A_BASIS, phi)][kind]
        state = apply(op, state)
    assert abs(state.norm() - 1) < 1e-12
    assert abs(sum(probabilities(state).values()) - 1) < 1e-12
