"""Subsolvers and the coupled stepper against closed-form and reference-ODE
oracles."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from magnetoelastic import fields as flds
from magnetoelastic.bases import VelocityBasis
from magnetoelastic.domain import ConfigurationError, Domain, Rank, SpectralField
from magnetoelastic.integrators import (CoeffTrajectory, ConstraintViolation,
                                        DivergedError, MonolithicStepper,
                                        SimState, _ifrk4_step,
                                        solve_F_given_v, solve_M_given_v,
                                        solve_v_given_FM, window_times)
from magnetoelastic.operators import assemble_convection_tensor
from magnetoelastic.params import (ElasticLaw, ExternalField, ModelParams,
                                   UnsupportedParameters)

P = ModelParams(nu=0.1, kappa=0.1, elastic=ElasticLaw(c_e=0.01))


def zero_traj(m, t0=0.0, t1=1.0, dt=1e-2):
    times = window_times(t0, t1, dt)
    return CoeffTrajectory.constant(times, np.zeros(m))


# -- trajectory container ----------------------------------------------------------


def test_trajectory_validation():
    with pytest.raises(ConfigurationError):
        CoeffTrajectory(np.array([0.0]), np.zeros((1, 3)))
    with pytest.raises(ConfigurationError):
        CoeffTrajectory(np.array([0.0, 0.0]), np.zeros((2, 3)))
    with pytest.raises(ConfigurationError):
        CoeffTrajectory(np.array([0.0, 1.0]), np.zeros((3, 3)))
    with pytest.raises(ConfigurationError):
        CoeffTrajectory(np.array([0.0, 1.0]), np.zeros((2, 3)), np.zeros((2, 4)))


def test_trajectory_interpolation():
    times = np.array([0.0, 1.0, 2.0])
    g = np.array([[0.0], [2.0], [4.0]])
    tr = CoeffTrajectory(times, g, g.copy())
    assert tr.interp_g(0.5)[0] == 1.0
    assert tr.interp_g(-1.0)[0] == 0.0
    assert tr.interp_g(3.0)[0] == 4.0
    assert tr.interp_D(1.5)[0] == 3.0
    with pytest.raises(ConfigurationError):
        CoeffTrajectory(times, g).interp_D(0.5)


# -- velocity coefficient solver ------------------------------------------------------


def test_solve_v_pure_decay_exact():
    d = Domain(32)
    basis = VelocityBasis(d, 1)
    tensors = assemble_convection_tensor(basis)
    times = window_times(0.0, 1.0, 0.05)
    d_traj = CoeffTrajectory(times, np.zeros((len(times), 1)), np.zeros((len(times), 1)))
    out = solve_v_given_FM(d_traj, np.array([1.0]), tensors, P)
    exact = np.exp(-P.nu * basis.eigenvalues[0] * times)
    assert np.abs(out.g[:, 0] - exact).max() < 1e-12


def test_solve_v_constant_forcing_inviscid_limit():
    d = Domain(32)
    basis = VelocityBasis(d, 1)
    tensors = assemble_convection_tensor(basis)
    params = ModelParams(nu=1e-30, kappa=0.1)
    times = window_times(0.0, 1.0, 0.05)
    D = np.full((len(times), 1), 0.7)
    out = solve_v_given_FM(CoeffTrajectory(times, np.zeros_like(D), D),
                           np.array([0.3]), tensors, params)
    assert np.abs(out.g[:, 0] - (0.3 + 0.7 * times)).max() < 1e-12


def test_solve_v_energy_decays_without_forcing():
    d = Domain(32)
    basis = VelocityBasis(d, 16)
    tensors = assemble_convection_tensor(basis)
    rng = np.random.default_rng(0)
    g0 = rng.standard_normal(16) * 0.3
    times = window_times(0.0, 1.0, 1e-2)
    d_traj = CoeffTrajectory(times, np.zeros((len(times), 16)), np.zeros((len(times), 16)))
    out = solve_v_given_FM(d_traj, g0, tensors, P)
    energy = np.sum(out.g**2, axis=1)
    assert np.all(np.diff(energy) <= 1e-12)


def test_solve_v_inviscid_energy_conserved_to_integrator_order():
    d = Domain(32)
    basis = VelocityBasis(d, 16)
    tensors = assemble_convection_tensor(basis)
    params = ModelParams(nu=1e-30, kappa=0.1)
    rng = np.random.default_rng(1)
    g0 = rng.standard_normal(16) * 0.5
    times = window_times(0.0, 1.0, 1e-3)
    d_traj = CoeffTrajectory(times, np.zeros((len(times), 16)), np.zeros((len(times), 16)))
    out = solve_v_given_FM(d_traj, g0, tensors, params)
    energy = np.sum(out.g**2, axis=1)
    assert np.abs(energy - energy[0]).max() < 1e-10 * energy[0]


def test_solve_v_blowup_detection():
    d = Domain(32)
    basis = VelocityBasis(d, 4)
    tensors = assemble_convection_tensor(basis)
    times = window_times(0.0, 10.0, 0.5)
    D = np.full((len(times), 4), 1e11)
    with pytest.raises(DivergedError):
        solve_v_given_FM(CoeffTrajectory(times, np.zeros_like(D), D),
                         np.zeros(4), tensors, ModelParams(nu=1e-30, kappa=0.1))


# -- deformation-gradient solver -------------------------------------------------------


def test_solve_f_heat_kernel_decay():
    d = Domain(32)
    basis = VelocityBasis(d, 4)
    F0 = flds.random_field(d, Rank.TENSOR2, band=4, amplitude=0.8, seed=2)
    traj = solve_F_given_v(zero_traj(4), F0.coeffs, basis, P)
    expect = F0.coeffs * np.exp(-P.kappa * d.k2)
    scale = np.abs(expect)
    mask = scale > 1e-13
    assert (np.abs(traj.data[-1] - expect)[mask] / scale[mask]).max() < 1e-10


def test_solve_f_zero_fixed_point():
    d = Domain(32)
    basis = VelocityBasis(d, 8)
    v = flds.random_divfree_velocity(d, band=2, amplitude=0.5, seed=3)
    times = window_times(0.0, 0.5, 1e-2)
    vtraj = CoeffTrajectory.constant(times, basis.project(v))
    traj = solve_F_given_v(vtraj, np.zeros((4, 32, 32), dtype=complex), basis, P)
    assert np.abs(traj.data[-1]).max() < 1e-15


def test_solve_f_superposition():
    d = Domain(32)
    basis = VelocityBasis(d, 8)
    v = flds.random_divfree_velocity(d, band=2, amplitude=0.4, seed=4)
    times = window_times(0.0, 0.5, 1e-2)
    vtraj = CoeffTrajectory.constant(times, basis.project(v))
    Fa = flds.random_field(d, Rank.TENSOR2, band=3, amplitude=0.5, seed=5)
    Fb = flds.random_field(d, Rank.TENSOR2, band=3, amplitude=0.5, seed=6)
    out_a = solve_F_given_v(vtraj, Fa.coeffs, basis, P).data[-1]
    out_b = solve_F_given_v(vtraj, Fb.coeffs, basis, P).data[-1]
    out_ab = solve_F_given_v(vtraj, Fa.coeffs + Fb.coeffs, basis, P).data[-1]
    assert np.abs(out_a + out_b - out_ab).max() < 1e-10


# -- magnetization solver ----------------------------------------------------------------


def test_solve_m_harmonic_map_stationary():
    d = Domain(32)
    basis = VelocityBasis(d, 4)
    x, _ = d.grid()
    M0 = SpectralField.from_grid(d, Rank.VEC3,
                                 np.stack([np.sin(x), np.cos(x), np.zeros_like(x)]))
    traj = solve_M_given_v(zero_traj(4, dt=2e-3), M0.coeffs, ExternalField("zero"), basis, P)
    assert np.abs(traj.data[-1] - M0.coeffs).max() < 1e-10


def test_solve_m_damped_precession_vs_reference_ode():
    d = Domain(32)
    basis = VelocityBasis(d, 4)
    h0 = 0.5
    hx = ExternalField("uniform_constant", h0=h0)
    M0 = flds.constant_unit_m(d, (1.0, 0.0, 0.0))
    traj = solve_M_given_v(zero_traj(4, dt=1e-3), M0.coeffs, hx, basis, P)

    H = np.array([0.0, 0.0, h0])

    def rhs(t, m):
        return -np.cross(m, H) + H - m * np.dot(m, H)

    sol = solve_ivp(rhs, [0.0, 1.0], [1.0, 0.0, 0.0], rtol=1e-12, atol=1e-14)
    got = d.backward(traj.data[-1])[:, 0, 0]
    assert np.abs(got - sol.y[:, -1]).max() < 1e-8


def test_solve_m_rejects_off_sphere_initial_data():
    d = Domain(32)
    basis = VelocityBasis(d, 4)
    M0 = flds.constant_unit_m(d)
    M0.coeffs[2, 0, 0] = 1.1
    with pytest.raises(ConstraintViolation):
        solve_M_given_v(zero_traj(4), M0.coeffs, ExternalField("zero"), basis, P)


def test_solve_m_requires_normalized_parameters():
    d = Domain(32)
    basis = VelocityBasis(d, 4)
    with pytest.raises(UnsupportedParameters):
        solve_M_given_v(zero_traj(4), flds.constant_unit_m(d).coeffs,
                        ExternalField("zero"), basis, ModelParams(lambda_llg=0.5))


def test_solve_m_drift_abort_and_renormalize():
    d = Domain(32)
    basis = VelocityBasis(d, 4)
    M0 = flds.unit_magnetization(d, band=2, amplitude=0.4, seed=7)
    hx = ExternalField("uniform_constant", h0=2.0)
    with pytest.raises(ConstraintViolation):
        solve_M_given_v(zero_traj(4, t1=0.2, dt=2e-3), M0.coeffs, hx, basis, P,
                        drift_threshold=1e-16, on_drift="abort")
    traj = solve_M_given_v(zero_traj(4, t1=0.2, dt=2e-3), M0.coeffs, hx, basis, P,
                           renormalize=True)
    grid = d.backward(traj.data[-1])
    assert np.abs(np.sqrt(np.sum(grid**2, axis=0)) - 1.0).max() < 1e-13


def test_solve_m_preserves_reflection_symmetry():
    d = Domain(32)
    basis = VelocityBasis(d, 4)
    rng = np.random.default_rng(8)
    x = d.axis()
    th = 0.3 * np.sin(x + rng.uniform(0, np.pi))[:, None] * np.ones(d.n)[None]
    ph = 0.2 * np.cos(2 * x)[:, None] * np.ones(d.n)[None]
    M0 = SpectralField.from_grid(
        d, Rank.VEC3, np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)]))
    hx = ExternalField("uniform_constant", h0=0.5)
    traj = solve_M_given_v(zero_traj(4, dt=2e-3), M0.coeffs, hx, basis, P)
    grid = d.backward(traj.data[-1])
    # y-independence (a reflection symmetry of the data) is retained
    assert np.abs(grid - grid[:, :, :1]).max() < 1e-10


# -- integrating-factor machinery ------------------------------------------------------


def test_ifrk4_stiff_part_exact():
    lam = -np.array([0.5, 5.0, 50.0, 500.0])
    y = (np.array([1.0, 1.0, 1.0, 1.0]),)
    t, dt = 0.0, 0.1
    for _ in range(10):
        y = _ifrk4_step(y, t, dt, (lam,), lambda z, s: (np.zeros(4),))
        t += dt
    assert np.abs(y[0] - np.exp(lam * t)).max() < 1e-12


def test_ifrk4_explicit_mode_matches_classical_rk4_order():
    lam = (np.array([-1.0]),)
    errs = []
    for dt in (0.1, 0.05):
        y = (np.array([1.0]),)
        t = 0.0
        while t < 1.0 - 1e-12:
            y = _ifrk4_step(y, t, dt, lam, lambda z, s: (np.zeros(1),), explicit=True)
            t += dt
        errs.append(abs(y[0][0] - np.exp(-1.0)))
    assert 12.0 < errs[0] / errs[1] < 20.0


# -- coupled stepper ---------------------------------------------------------------------


def test_monolithic_zero_data_is_equilibrium(domain32, basis16, tensors16):
    st = SimState(0.0, np.zeros(16), np.zeros((4, 32, 32), dtype=complex),
                  flds.constant_unit_m(domain32).coeffs, domain32, basis16)
    stepper = MonolithicStepper(tensors16, P, ExternalField("zero"))
    out = stepper.step(st, 1e-2)
    assert np.abs(out.g).max() < 1e-15
    assert np.abs(out.Fh).max() < 1e-15
    assert np.abs(out.Mh - st.Mh).max() < 1e-14


def test_monolithic_taylor_green_decay(domain32, basis16, tensors16):
    g0 = basis16.project(flds.taylor_green_velocity(domain32))
    st = SimState(0.0, g0, np.zeros((4, 32, 32), dtype=complex),
                  flds.constant_unit_m(domain32).coeffs, domain32, basis16)
    stepper = MonolithicStepper(tensors16, P, ExternalField("zero"))
    for _ in range(100):
        st = stepper.step(st, 1e-3)
    exact = g0 * np.exp(-2.0 * P.nu * st.t)
    assert np.linalg.norm(st.g - exact) / np.linalg.norm(exact) < 1e-10


def test_monolithic_self_convergence_fourth_order(domain32, basis16, tensors16,
                                                  small_state_factory):
    hx = ExternalField("uniform_constant", h0=1.0, direction=(0.3, 0.2, 0.93))
    stepper = MonolithicStepper(tensors16, P, hx)
    finals = {}
    for dt in (4e-3, 2e-3, 1e-3):
        st = small_state_factory(seed=5, amp_v=0.1, amp_m=0.25, band=2)
        for _ in range(int(round(0.2 / dt))):
            st = stepper.step(st, dt)
        finals[dt] = st
    e1 = np.abs(finals[4e-3].Mh - finals[2e-3].Mh).max() + np.abs(finals[4e-3].Fh - finals[2e-3].Fh).max()
    e2 = np.abs(finals[2e-3].Mh - finals[1e-3].Mh).max() + np.abs(finals[2e-3].Fh - finals[1e-3].Fh).max()
    assert 12.0 < e1 / e2 < 20.0


def test_monolithic_requires_normalized_parameters(tensors16):
    with pytest.raises(UnsupportedParameters):
        MonolithicStepper(tensors16, ModelParams(gamma_llg=3.0), ExternalField("zero"))


def test_monolithic_blowup_raises(domain32, basis16, tensors16):
    rng = np.random.default_rng(9)
    st = SimState(0.0, rng.standard_normal(16) * 1e8,
                  np.zeros((4, 32, 32), dtype=complex),
                  flds.constant_unit_m(domain32).coeffs, domain32, basis16)
    stepper = MonolithicStepper(tensors16, P, ExternalField("zero"))
    with pytest.raises(DivergedError):
        for _ in range(50):
            st = stepper.step(st, 1e-2)
