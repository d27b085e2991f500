import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from biphoton import rto
from biphoton.optics import (
    ElementSpec,
    beam_splitter,
    build,
    compose,
    lift,
    mirror,
    phase_distance,
    phase_shifter,
    wrap_phase,
)
from biphoton.qcore import (
    A_BASIS,
    AB_BASIS,
    B_BASIS,
    BasisError,
    Operator,
    StateVector,
    apply,
    density_from_pure,
    partial_trace,
    probabilities,
    random_state,
    tensor,
    unitarity_error,
)

S = 1 / np.sqrt(2)


def test_beam_splitter_matches_convention():
    np.testing.assert_allclose(beam_splitter().matrix, oracles.BS, atol=0)
    out = apply(beam_splitter(), StateVector.basis_state(A_BASIS, "A1"))
    np.testing.assert_allclose(out.amplitudes, [S, 1j * S], atol=1e-15)
    assert list(probabilities(out).values()) == pytest.approx([0.5, 0.5], abs=1e-15)


def test_beam_splitter_twice_sends_everything_to_mode_two():
    twice = compose([beam_splitter(), beam_splitter()])
    out = apply(twice, StateVector.basis_state(A_BASIS, "A1"))
    np.testing.assert_allclose(out.amplitudes, oracles.matvec(oracles.matmul(oracles.BS, oracles.BS), [1, 0]),
                               atol=1e-15)
    assert probabilities(out)["A2"] == pytest.approx(1, abs=1e-15)
    assert unitarity_error(beam_splitter().matrix) < 1e-12


def test_phase_shifter_examples():
    assert phase_shifter(0.0, "A1").allclose(Operator.identity(A_BASIS))
    out = apply(phase_shifter(np.pi / 2, "A1"), StateVector.basis_state(A_BASIS, "A1"))
    np.testing.assert_allclose(out.amplitudes, [1j, 0], atol=1e-15)
    assert phase_shifter(1.0, "B2").basis == B_BASIS


def test_phase_shifter_unknown_label():
    with pytest.raises(BasisError):
        phase_shifter(1.0, "C7")
    with pytest.raises(BasisError):
        phase_shifter(1.0, "B1", A_BASIS)


def test_mirror_is_global_phase(rng):
    s = random_state(A_BASIS, rng)
    m = mirror(A_BASIS)
    assert probabilities(apply(m, s)) == pytest.approx(probabilities(s), abs=1e-15)
    twice = compose([m, m])
    np.testing.assert_allclose(twice.matrix, np.exp(1j * np.pi) * np.eye(2), atol=1e-15)
    eq1 = StateVector(A_BASIS, [S, S])
    assert list(probabilities(apply(m, eq1)).values()) == pytest.approx([0.5, 0.5])


def test_lift_identity_and_kron():
    assert lift(Operator.identity(A_BASIS), "A").allclose(Operator.identity(AB_BASIS))
    ps = phase_shifter(np.pi, "B2")
    lifted = lift(ps, "B")
    np.testing.assert_allclose(lifted.matrix, oracles.kron(np.eye(2).tolist(), ps.matrix.tolist()),
                               atol=0)
    out = apply(lifted, rto.prepare_entangled())
    np.testing.assert_allclose(out.amplitudes, [S, 0, 0, -S], atol=1e-15)
    assert unitarity_error(lift(beam_splitter(), "A").matrix) < 1e-12


def test_lift_rejects_bad_subsystem():
    with pytest.raises(BasisError):
        lift(beam_splitter(A_BASIS), "C")
    with pytest.raises(BasisError):
        lift(beam_splitter(A_BASIS), "B")


def test_compose_examples():
    u = compose([beam_splitter(), phase_shifter(0.7, "A2")])
    assert compose([u, u.dagger()]).allclose(Operator.identity(A_BASIS))
    a, b = 4.0, 3.5
    assert compose([phase_shifter(a, "A1"), phase_shifter(b, "A1")]).allclose(
        phase_shifter((a + b) % (2 * np.pi), "A1"))
    with pytest.raises(BasisError):
        compose([beam_splitter(A_BASIS), beam_splitter(B_BASIS)])


def test_compose_mz_pipeline_reproduces_oracle():
    for phi1, phi2 in [(0.3, 1.0), (2.0, 0.1), (5.5, 5.5)]:
        mz = compose([beam_splitter(), phase_shifter(phi2, "A2"),
                      phase_shifter(phi1, "A1"), beam_splitter()])
        out = apply(mz, StateVector.basis_state(A_BASIS, "A1"))
        np.testing.assert_allclose(out.amplitudes, oracles.mz_output(phi1, phi2), atol=1e-15)


def test_element_spec_build_order():
    elements = [ElementSpec("beam_splitter"), ElementSpec("phase_shifter", 0.4, "A1"),
                ElementSpec("mirror"), ElementSpec("beam_splitter")]
    expected = compose([beam_splitter(), mirror(), phase_shifter(0.4, "A1"), beam_splitter()])
    assert build(elements).allclose(expected)
    assert ElementSpec("phase_shifter", -0.5, "A1").phase == pytest.approx(2 * np.pi - 0.5)
    assert ElementSpec("mirror").phase == pytest.approx(np.pi / 2)
    with pytest.raises(ValueError):
        ElementSpec("lens")
    with pytest.raises(ValueError):
        ElementSpec("phase_shifter", 1.0)


def test_wrap_phase_range():
    for phi in (-1e-18, -np.pi, 0.0, 2 * np.pi, 7.0, -50.0):
        w = wrap_phase(phi)
        assert 0 <= w < 2 * np.pi
    assert phase_distance(0.1, 2 * np.pi - 0.1) == pytest.approx(0.2)


def test_all_elements_unitary():
    for op in (beam_splitter(A_BASIS), beam_splitter(B_BASIS), phase_shifter(2.2, "A1"),
               mirror(B_BASIS, 0.3), lift(phase_shifter(1.0, "B1"), "B")):
        assert op.unitary
        assert unitarity_error(op.matrix) < 1e-12


angles = st.floats(min_value=0, max_value=2 * np.pi, allow_nan=False)


def _random_local(rng, basis):
    ops = [beam_splitter(basis), phase_shifter(rng.uniform(0, 7), basis.labels[1], basis),
           phase_shifter(rng.uniform(0, 7), basis.labels[0], basis), mirror(basis, rng.uniform(0, 7))]
    order = rng.permutation(len(ops))
    return compose([ops[k] for k in order])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_lift_commutes_with_tensor(seed):
    r = np.random.default_rng(seed)
    a, b = random_state(A_BASIS, r), random_state(B_BASIS, r)
    ua, ub = _random_local(r, A_BASIS), _random_local(r, B_BASIS)
    assert apply(lift(ua, "A"), tensor(a, b)).allclose(tensor(apply(ua, a), b))
    assert apply(lift(ub, "B"), tensor(a, b)).allclose(tensor(a, apply(ub, b)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), angles)
def test_mirror_insertion_changes_no_probability(seed, mphase):
    r = np.random.default_rng(seed)
    u = _random_local(r, A_BASIS)
    s = random_state(A_BASIS, r)
    with_mirror = compose([u, mirror(A_BASIS, mphase)])
    p0 = probabilities(apply(u, s))
    p1 = probabilities(apply(with_mirror, s))
    assert max(abs(p0[k] - p1[k]) for k in p0) < 1e-12


def test_local_a_operations_leave_b_untouched(rng):
    psi = rto.prepare_entangled()
    rho_b = partial_trace(density_from_pure(psi), "B").matrix
    for _ in range(100):
        u = lift(_random_local(rng, A_BASIS), "A")
        out = partial_trace(density_from_pure(apply(u, psi)), "B").matrix
        assert np.max(np.abs(out - rho_b)) < 1e-12
