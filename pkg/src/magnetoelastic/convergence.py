"""Observed-order studies against analytic oracles.

The integrating-factor stepper is exact on the linear benchmark problems
(vortex decay, heat decay), so these cases run the classical explicit RK4
variant to expose a measurable fourth-order error; the magnetization cases
(damped precession, unit-norm drift) have genuine nonlinear truncation error
under the production integrator itself.
"""

from __future__ import annotations

import numpy as np

from . import fields as flds
from .bases import VelocityBasis
from .coupler import FixedPointConfig, run
from .domain import Domain
from .integrators import CoeffTrajectory, SimState, solve_v_given_FM, window_times
from .operators import assemble_convection_tensor
from .params import ElasticLaw, ExternalField, ModelParams

ORDER_BAND = (3.8, 4.2)


def taylor_green_case():
    """Explicit RK4 on the velocity coefficient system vs the closed-form
    decaying vortex (the forcing-free dynamics leave the vortex manifold
    invariant, so the oracle is exact)."""
    domain = Domain(16)
    basis = VelocityBasis(domain, 8)
    tensors = assemble_convection_tensor(basis)
    params = ModelParams(nu=1.0, kappa=0.1)
    g0 = basis.project(flds.taylor_green_velocity(domain))
    T = 1.0
    dts, errors = [], []
    for dt in (0.05, 0.025, 0.0125):
        times = window_times(0.0, T, dt)
        d_traj = CoeffTrajectory(times, np.zeros((len(times), basis.m)),
                                 np.zeros((len(times), basis.m)))
        out = solve_v_given_FM(d_traj, g0, tensors, params, stiff_mode="explicit")
        exact = g0 * np.exp(-2.0 * params.nu * T)
        errors.append(float(np.linalg.norm(out.g[-1] - exact) / np.linalg.norm(exact)))
        dts.append(dt)
    return dts, errors, *ORDER_BAND


def heat_f_case():
    """Explicit RK4 on the per-mode heat decay of the deformation gradient
    (v = 0 makes the system diagonal) vs the exact exponential."""
    domain = Domain(16)
    kappa = 0.5
    rng = np.random.default_rng(7)
    Fh = flds.random_band_coeffs(domain, 4, 2, rng)
    lam = -kappa * domain.k2
    T = 1.0
    exact = Fh * np.exp(lam * T)
    dts, errors = [], []
    for dt in (0.05, 0.025, 0.0125):
        y = Fh.copy()
        for _ in range(int(round(T / dt))):
            k1 = lam * y
            k2 = lam * (y + 0.5 * dt * k1)
            k3 = lam * (y + 0.5 * dt * k2)
            k4 = lam * (y + dt * k3)
            y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        errors.append(float(np.abs(y - exact).max() / np.abs(exact).max()))
        dts.append(dt)
    return dts, errors, *ORDER_BAND


def precession_case():
    """RK4 on the uniform damped-precession reduction of the magnetization
    equation vs a fine-step reference solution."""
    H = np.array([0.0, 0.0, 2.0])

    def rhs(m):
        return -np.cross(m, H) + H - m * np.dot(m, H)

    def integrate(dt, T=1.0):
        m = np.array([1.0, 0.0, 0.0])
        for _ in range(int(round(T / dt))):
            k1 = rhs(m)
            k2 = rhs(m + 0.5 * dt * k1)
            k3 = rhs(m + 0.5 * dt * k2)
            k4 = rhs(m + dt * k3)
            m = m + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        return m

    ref = integrate(1.0 / 16384.0)
    dts, errors = [], []
    for dt in (0.02, 0.01, 0.005):
        errors.append(float(np.abs(integrate(dt) - ref).max()))
        dts.append(dt)
    return dts, errors, *ORDER_BAND


def m_drift_case():
    """Unit-norm drift of the coupled integrator under a strong uniform field;
    the drift is pure time-integration error, so halving dt divides it by
    about sixteen."""
    domain = Domain(32)
    basis = VelocityBasis(domain, 16)
    tensors = assemble_convection_tensor(basis)
    params = ModelParams(nu=0.1, kappa=0.1, elastic=ElasticLaw(c_e=0.01))
    hext = ExternalField("uniform_constant", h0=12.0, direction=(0.2, 0.1, 0.97))
    v0 = flds.random_divfree_velocity(domain, band=1, amplitude=0.05, seed=21)
    M0 = flds.unit_magnetization(domain, band=1, amplitude=0.3, seed=22)
    F0 = flds.identity_tensor(domain)
    g0 = basis.project(v0)
    cfg = FixedPointConfig(mode="monolithic")
    dts, drifts = [], []
    for dt in (1e-3, 5e-4):
        state = SimState(0.0, g0.copy(), F0.coeffs.copy(), M0.coeffs.copy(), domain, basis)
        result = run(state, 1.0, dt, cfg, hext, tensors, params)
        drifts.append(max(s.m_drift() for s in result.samples))
        dts.append(dt)
    return dts, drifts, np.log2(12.0), np.log2(20.0)
