import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from bresse.diagnostics import energy_forms
from bresse.discretization import build_system
from bresse.model_catalog import CouplingPattern, Fourier, ModelSpec
from bresse.time_integration import (
    IntegrationError,
    IntegratorConfig,
    Scheme,
    Stepper,
    integrate,
    step,
)
from bresse.verify import DESK, smooth_state

ELASTIC_N2 = build_system(ModelSpec(DESK, CouplingPattern.Elastic), 2)  # D = 12


def test_scalar_midpoint_factor():
    assert step(np.array([[-1.0]]), np.array([1.0]), 0.1)[0] == pytest.approx(0.95 / 1.05, rel=1e-15)


def test_scalar_backward_euler_factor():
    cfg = IntegratorConfig(dt=0.1, T=1.0, scheme=Scheme.BackwardEuler)
    assert step(np.array([[-1.0]]), np.array([1.0]), 0.1, cfg)[0] == pytest.approx(1 / 1.1, rel=1e-15)


@pytest.mark.parametrize("scheme", list(Scheme))
def test_zero_operator_is_identity(scheme):
    u = np.array([1.0, -2.0, 3.0])
    cfg = IntegratorConfig(dt=0.5, T=1.0, scheme=scheme)
    np.testing.assert_array_equal(step(sp.csr_matrix((3, 3)), u, 0.5, cfg), u)


def test_zero_state_stays_zero():
    traj = integrate(ELASTIC_N2, np.zeros(12), IntegratorConfig(dt=0.01, T=0.1))
    assert not np.any(traj.states)


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        step(ELASTIC_N2, np.zeros(5), 0.1)
    with pytest.raises(ValueError, match="shape"):
        integrate(ELASTIC_N2, np.zeros(5), IntegratorConfig(dt=0.1, T=1.0))


def test_singular_step_matrix_is_reported():
    # I - dt/2 A vanishes for A = 2/dt
    with pytest.raises(IntegrationError, match="dt=0.5"):
        Stepper(sp.csc_matrix(np.array([[4.0]])), 0.5)


@pytest.mark.parametrize(
    "kwargs,field",
    [
        (dict(dt=0.0, T=1.0), "dt"),
        (dict(dt=0.1, T=-1.0), "T"),
        (dict(dt=2.0, T=1.0), "dt"),
        (dict(dt=0.1, T=1.0, tol=1e-3), "tol"),
        (dict(dt=0.1, T=1.0, tol=0.0), "tol"),
        (dict(dt=0.1, T=1.0, stride=0), "stride"),
    ],
)
def test_config_validation(kwargs, field):
    with pytest.raises(ValueError, match=field):
        IntegratorConfig(**kwargs)


def test_times_and_stride():
    cfg = IntegratorConfig(dt=0.01, T=1.0, stride=10)
    u0 = smooth_state(ELASTIC_N2)
    traj = integrate(ELASTIC_N2, u0, cfg)
    full = integrate(ELASTIC_N2, u0, IntegratorConfig(dt=0.01, T=1.0))
    assert len(traj) == 11 and traj.times[0] == 0.0
    np.testing.assert_allclose(np.diff(traj.times), 0.1)
    np.testing.assert_array_equal(traj.states, full.states[::10])


def test_observers_and_step_hook():
    cfg = IntegratorConfig(dt=0.1, T=1.0, stride=2)
    seen = []
    traj = integrate(
        ELASTIC_N2,
        smooth_state(ELASTIC_N2),
        cfg,
        observers={"norm": lambda t, u: float(np.linalg.norm(u))},
        on_step=lambda i, a, b: seen.append(i),
    )
    assert seen == list(range(1, 11))
    np.testing.assert_allclose(traj.observations["norm"], np.linalg.norm(traj.states, axis=1))


def test_deterministic():
    u0 = smooth_state(ELASTIC_N2)
    cfg = IntegratorConfig(dt=0.01, T=0.5)
    a = integrate(ELASTIC_N2, u0, cfg).states
    b = integrate(ELASTIC_N2, u0, cfg).states
    assert a.tobytes() == b.tobytes()


@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**32 - 1))
def test_linearity(alpha, beta, seed):
    rng = np.random.default_rng(seed)
    sys = build_system(ModelSpec(DESK, CouplingPattern.SingleShear, Fourier()), 4)
    u, v = rng.standard_normal((2, sys.dim))
    cfg = IntegratorConfig(dt=0.05, T=0.5)
    lhs = integrate(sys, alpha * u + beta * v, cfg).final
    rhs = alpha * integrate(sys, u, cfg).final + beta * integrate(sys, v, cfg).final
    scale = max(1.0, np.linalg.norm(lhs))
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * scale * (1 + abs(alpha) + abs(beta))


def test_elastic_energy_constant():
    sys = build_system(ModelSpec(DESK, CouplingPattern.Elastic), 8)
    E = energy_forms(sys)[0]
    traj = integrate(sys, smooth_state(sys), IntegratorConfig(dt=1e-3, T=1.0))
    e = E.value(traj.states.T)
    assert np.max(np.abs(e - e[0])) / e[0] <= 1e-10


def test_midpoint_matches_matrix_exponential_at_small_dimension():
    A = ELASTIC_N2.operator.toarray()
    u0 = smooth_state(ELASTIC_N2)
    ref = expm(A) @ u0
    out = integrate(ELASTIC_N2, u0, IntegratorConfig(dt=1e-4, T=1.0)).final
    assert np.linalg.norm(out - ref) / np.linalg.norm(ref) < 1e-6


def test_temporal_order():
    A = ELASTIC_N2.operator.toarray()
    u0 = smooth_state(ELASTIC_N2)
    ref = expm(A) @ u0
    errors = []
    for dt in (1e-2, 5e-3, 2.5e-3):
        out = integrate(ELASTIC_N2, u0, IntegratorConfig(dt=dt, T=1.0)).final
        errors.append(np.linalg.norm(out - ref))
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(orders >= 1.9), orders


def test_backward_euler_is_first_order_and_dissipative():
    A = ELASTIC_N2.operator.toarray()
    u0 = smooth_state(ELASTIC_N2)
    ref = expm(A) @ u0
    E = energy_forms(ELASTIC_N2)[0]
    errors = []
    for dt in (1e-2, 5e-3):
        traj = integrate(ELASTIC_N2, u0, IntegratorConfig(dt=dt, T=1.0, scheme=Scheme.BackwardEuler))
        errors.append(np.linalg.norm(traj.final - ref))
        assert np.all(np.diff(E.value(traj.states.T)) <= 0)
    assert 0.8 < np.log2(errors[0] / errors[1]) < 1.2


def test_dissipative_energy_never_increases_for_large_steps():
    sys = build_system(ModelSpec(DESK, CouplingPattern.SingleShear, Fourier()), 8)
    E = energy_forms(sys)[0]
    for dt in (0.5, 0.1, 1e-3):
        traj = integrate(sys, smooth_state(sys), IntegratorConfig(dt=dt, T=1.0))
        e = E.value(traj.states.T)
        assert np.all(np.diff(e) <= 1e-14 * e[0])
