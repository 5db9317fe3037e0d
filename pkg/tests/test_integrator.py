import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plaquette import (
    IntegratorConfig,
    InvalidParameters,
    NonFinite,
    PlaquetteParams,
    State,
    ToleranceExceeded,
    analytic_amplitudes,
    energy,
    initial_state_paper,
    integrate,
    step_rk4,
    step_split4,
)
from plaquette.integrator import evolve_amplitudes

from conftest import RawParams, exact_linear, random_state


def test_config_validation():
    with pytest.raises(InvalidParameters):
        IntegratorConfig(dt=0)
    with pytest.raises(InvalidParameters):
        IntegratorConfig(dt=1.0, t_max=0.5)
    with pytest.raises(InvalidParameters):
        IntegratorConfig(sample_stride=0)
    with pytest.raises(InvalidParameters):
        IntegratorConfig(norm_tolerance=0)
    with pytest.raises(InvalidParameters):
        IntegratorConfig(scheme="euler")
    c = IntegratorConfig()
    assert (c.dt, c.t_max, c.renormalize) == (1e-3, 100.0, False)
    assert c.nsteps == 100000
    assert c.replace(t_max=200).nsteps == 200000


def test_rk4_zero_rhs_leaves_state_alone():
    s = State.normalized([0.3, 0.4j, -0.5, 0.1 + 0.2j], t=2.0)
    out = step_rk4(s, RawParams(0, 0, 0.7, 0), 0.01)
    np.testing.assert_array_equal(out.psi, s.psi)
    assert out.t == pytest.approx(2.01)


def test_rk4_single_site_phase():
    out = step_rk4(State([1, 0, 0, 0]), RawParams(0, 0, 0, 1.0), 0.01)
    assert abs(out.psi[0] - np.exp(-0.01j)) < 0.01**5
    np.testing.assert_array_equal(out.psi[1:], 0)


def test_rk4_norm_drift_per_step():
    p = PlaquetteParams(K=1, phi=0.5 * math.pi, U=21)
    s = initial_state_paper()
    for _ in range(200):
        n0 = np.sum(np.abs(s.psi) ** 2)
        s = step_rk4(s, p, 1e-3)
        assert abs(np.sum(np.abs(s.psi) ** 2) - n0) <= 1e-12


def test_step_functions_agree_with_kernels():
    p = PlaquetteParams(K=0.8, phi=1.1, U=6)
    s = initial_state_paper()
    _, rk = evolve_amplitudes(s.psi, p, IntegratorConfig(dt=1e-3, t_max=1e-3, sample_stride=1, scheme="rk4"))
    np.testing.assert_allclose(step_rk4(s, p, 1e-3).psi, rk[-1], atol=1e-15)
    _, sp = evolve_amplitudes(s.psi, p, IntegratorConfig(dt=1e-3, t_max=1e-3, sample_stride=1))
    np.testing.assert_array_equal(step_split4(s, p, 1e-3).psi, sp[-1])
    # the two schemes agree to their truncation error
    assert np.max(np.abs(sp[-1] - rk[-1])) < 1e-12


def test_step_rejects_bad_dt():
    with pytest.raises(InvalidParameters):
        step_rk4(initial_state_paper(), PlaquetteParams(K=1, phi=0), 0)
    with pytest.raises(InvalidParameters):
        step_split4(initial_state_paper(), PlaquetteParams(K=1, phi=0), -1e-3)


@pytest.mark.parametrize("scheme", ["split4", "rk4"])
def test_matches_analytic_state(scheme):
    p = PlaquetteParams(K=0.5, phi=0.5 * math.pi)
    traj = integrate(initial_state_paper(), p, IntegratorConfig(t_max=100.0, keep_states=True, scheme=scheme))
    err = np.max(np.abs(traj.states - analytic_amplitudes(traj.times, p)))
    assert err <= 1e-8


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(-15, 15), st.floats(0.2, 2.5))
def test_linear_evolution_matches_matrix_exponential(K, phi, J):
    psi0 = random_state(np.random.default_rng(7))
    p = PlaquetteParams(K=K, phi=phi, J=J)
    cfg = IntegratorConfig(dt=1e-3, t_max=5.0, sample_stride=1000)
    t, states = evolve_amplitudes(psi0, p, cfg)
    np.testing.assert_allclose(states, exact_linear(t, K, J, phi, psi0), atol=1e-10)


def test_decoupled_sites_keep_occupations():
    s = State.normalized([0.6, 0.2j, -0.5, 0.3 + 0.1j])
    for U in (0.0, 3.0, 40.0):
        traj = integrate(s, RawParams(0, 0, 0.4, U), IntegratorConfig(t_max=20.0))
        np.testing.assert_allclose(traj.occupations, np.broadcast_to(np.abs(s.psi) ** 2, traj.occupations.shape), atol=1e-13)


@pytest.mark.parametrize("U", [20.0, 21.0])
def test_conservation_interacting(U):
    p = PlaquetteParams(K=1, phi=0.5 * math.pi, U=U)
    traj = integrate(initial_state_paper(), p, IntegratorConfig(t_max=200.0))
    assert traj.max_norm_drift <= 1e-10
    assert traj.max_energy_drift <= 1e-8
    assert traj.energies[0] == pytest.approx(energy(initial_state_paper(), p), abs=1e-14)


def test_trajectory_layout():
    cfg = IntegratorConfig(dt=1e-3, t_max=1.0037, sample_stride=7)
    traj = integrate(initial_state_paper(), PlaquetteParams(K=1, phi=1, U=3), cfg)
    n = len(traj)
    assert traj.times[0] == 0 and traj.times[-1] == pytest.approx(cfg.nsteps * cfg.dt)
    assert np.all(np.diff(traj.times) > 0)
    for arr in (traj.occupations, traj.centers, traj.norms, traj.energies):
        assert len(arr) == n
    assert traj.states is None
    with pytest.raises(ValueError):
        traj.state(0)
    assert traj.max_norm_drift == np.max(np.abs(traj.norms - 1))
    assert tuple(traj.centers[0]) == pytest.approx((-1.0, 0.0), abs=1e-15)
    assert sum(traj.occupation(3)) == pytest.approx(1.0, abs=1e-12)


def test_time_offset_carried_from_initial_state():
    s = State(initial_state_paper().psi, t=5.0)
    traj = integrate(s, PlaquetteParams(K=1, phi=0), IntegratorConfig(t_max=1.0, keep_states=True))
    assert traj.times[0] == 5.0 and traj.times[-1] == pytest.approx(6.0)
    assert traj.state(len(traj) - 1).t == pytest.approx(6.0)


def test_large_step_raises_tolerance_exceeded():
    with pytest.raises(ToleranceExceeded) as info:
        integrate(initial_state_paper(), PlaquetteParams(K=1, phi=0.5 * math.pi, U=21), IntegratorConfig(dt=0.1, t_max=200.0))
    assert info.value.energy_drift > 1e-8


def test_renormalize_suppresses_tolerance_error():
    cfg = IntegratorConfig(dt=0.05, t_max=50.0, renormalize=True, scheme="rk4")
    traj = integrate(initial_state_paper(), PlaquetteParams(K=1, phi=0.5 * math.pi, U=21), cfg)
    assert traj.max_norm_drift < 1e-12


def test_blow_up_raises_non_finite():
    # the split scheme's nonlinear step is an exact phase rotation and cannot
    # blow up; RK4 at U dt >> 1 does
    with pytest.raises(NonFinite):
        integrate(initial_state_paper(), PlaquetteParams(K=1, phi=0, U=1e8), IntegratorConfig(t_max=0.1, scheme="rk4"))


def test_split_scheme_stays_bounded_at_huge_interaction():
    traj = integrate(initial_state_paper(), PlaquetteParams(K=1, phi=0, U=1e8), IntegratorConfig(t_max=0.1, renormalize=True))
    assert np.all(np.isfinite(traj.norms))


def test_rejects_unnormalized_start():
    class Loose:
        psi = np.array([1.0, 0, 0, 0.01], dtype=complex)
        t = 0.0

    with pytest.raises(InvalidParameters):
        integrate(Loose(), PlaquetteParams(K=1, phi=0), IntegratorConfig(t_max=1.0))


@pytest.mark.parametrize("scheme", ["split4", "rk4"])
def test_fourth_order_convergence(scheme):
    p = PlaquetteParams(K=1.0, phi=0.5 * math.pi, U=5.0)
    T, dt = 10.0, 0.02

    def end(h):
        _, s = evolve_amplitudes(initial_state_paper().psi, p, IntegratorConfig(dt=h, t_max=T, sample_stride=10**6, scheme=scheme))
        return s[-1]

    ref = end(dt / 8)
    e1 = np.max(np.abs(end(dt) - ref))
    e2 = np.max(np.abs(end(dt / 2) - ref))
    assert 12 <= e1 / e2 <= 20


@pytest.mark.parametrize("U", [0.0, 3.0, 8.0])
def test_time_reversal_real_hamiltonian(U):
    # at phi = 0 the hopping is real, so conjugation reverses time
    p = PlaquetteParams(K=0.7, phi=0.0, U=U)
    cfg = IntegratorConfig(t_max=50.0, sample_stride=10**6)
    s0 = State.normalized([0.5, 0.3 + 0.2j, -0.4j, 0.6])
    _, fwd = evolve_amplitudes(s0.psi, p, cfg)
    _, back = evolve_amplitudes(np.conj(fwd[-1]), p, cfg)
    assert np.max(np.abs(back[-1] - np.conj(s0.psi))) <= 1e-7


@pytest.mark.parametrize("U", [0.0, 4.0])
def test_time_reversal_with_flux_reversed(U):
    # conjugation maps the flux phi to -phi
    p = PlaquetteParams(K=1.2, phi=1.3, U=U)
    cfg = IntegratorConfig(t_max=50.0, sample_stride=10**6)
    s0 = initial_state_paper()
    _, fwd = evolve_amplitudes(s0.psi, p, cfg)
    _, back = evolve_amplitudes(np.conj(fwd[-1]), p.replace(phi=-p.phi), cfg)
    assert np.max(np.abs(back[-1] - np.conj(s0.psi))) <= 1e-7


@pytest.mark.parametrize("K,U", [(0.3, 9.0), (1.0, 30.0), (0.5, 4.0)])
def test_zero_flux_symmetric_subspace_is_exact(K, U):
    _, s = evolve_amplitudes(initial_state_paper().psi, PlaquetteParams(K=K, phi=0, U=U), IntegratorConfig(t_max=200.0))
    np.testing.assert_array_equal(s[:, 3], -s[:, 0])
    np.testing.assert_array_equal(s[:, 2], -s[:, 1])
