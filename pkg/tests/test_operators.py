"""Constitutive and right-hand-side operators against analytic and
independent-quadrature oracles."""

import numpy as np
import pytest

from magnetoelastic import fields as flds
from magnetoelastic.bases import VelocityBasis
from magnetoelastic.domain import (ConfigurationError, Domain, Rank,
                                   SpectralField)
from magnetoelastic.operators import (CapacityError, PadEval,
                                      assemble_convection_tensor, body_force,
                                      effective_field, llg_rhs_cross,
                                      llg_rhs_expanded, magnetoelastic_stress,
                                      stress_forcing, transport_rhs_F)
from magnetoelastic.params import (ElasticLaw, ExternalField, ModelParams,
                                   UnsupportedParameters)

P = ModelParams(nu=0.1, kappa=0.1, elastic=ElasticLaw(c_e=0.01))


def refine(field, d_fine):
    """The same field represented on a finer grid (exact band-limited embed)."""
    d = field.domain
    return SpectralField(d_fine, field.rank, d_fine.zero_nyquist(d.pad(field.coeffs, d_fine.n)))


# -- effective field -------------------------------------------------------------


def test_effective_field_constant_m_uniform_h():
    d = Domain(32)
    M = flds.constant_unit_m(d)
    hx = ExternalField("uniform_constant", h0=0.7)
    He = effective_field(M, hx, 0.0, P).to_grid()
    assert np.allclose(He[2], 0.7, atol=1e-13)
    assert np.abs(He[:2]).max() < 1e-13


def test_effective_field_laplace_eigenfunction():
    d = Domain(32)
    x, _ = d.grid()
    M = SpectralField.from_grid(d, Rank.VEC3, np.stack([np.sin(x), np.cos(x), np.zeros_like(x)]))
    He = effective_field(M, ExternalField("zero"), 0.0, P)
    assert np.abs(He.to_grid() + M.to_grid()).max() < 1e-12


def test_effective_field_matches_refined_grid_oracle():
    d, d2 = Domain(32), Domain(64)
    M = flds.unit_magnetization(d, band=2, amplitude=0.3, seed=4)
    hx = ExternalField("uniform_constant", h0=0.4)
    He = effective_field(M, hx, 0.0, P)
    He2 = effective_field(refine(M, d2), hx, 0.0, P)
    assert np.abs(refine(He, d2).to_grid() - He2.to_grid()).max() < 1e-11


# -- magnetization right-hand sides ------------------------------------------------


def test_cross_rhs_parallel_field_reduces_to_transport():
    d = Domain(32)
    M = flds.unit_magnetization(d, band=2, amplitude=0.2, seed=5)
    # H_eff parallel to M pointwise
    He = SpectralField.from_grid(d, Rank.VEC3, 1.7 * M.to_grid())
    v = flds.random_divfree_velocity(d, band=2, amplitude=0.3, seed=6)
    rhs = llg_rhs_cross(v, M, He, P)
    pe = PadEval(d, "half")
    transport = -pe.spec(np.einsum("axy,caxy->cxy", pe.grid(v.coeffs), pe.grad_grid(M.coeffs)))
    assert np.abs(rhs.coeffs - transport).max() < 1e-11


def test_cross_rhs_constant_vector_algebra():
    d = Domain(16)
    gamma, lam, h0 = 1.3, 0.6, 0.9
    params = ModelParams(gamma_llg=gamma, lambda_llg=lam)
    M = flds.constant_unit_m(d, (0.0, 0.0, 1.0))
    He = SpectralField(d, Rank.VEC3, np.zeros((3, 16, 16), dtype=complex))
    He.coeffs[0, 0, 0] = h0
    v = SpectralField.zeros(d, Rank.VEC2)
    rhs = llg_rhs_cross(v, M, He, params).to_grid()
    # -gamma h0 (e3 x e1) - lam h0 e3 x (e3 x e1) = -gamma h0 e2 + lam h0 e1
    assert np.allclose(rhs[0], lam * h0, atol=1e-12)
    assert np.allclose(rhs[1], -gamma * h0, atol=1e-12)
    assert np.abs(rhs[2]).max() < 1e-12


def test_expanded_rhs_constant_equilibrium():
    d = Domain(16)
    M = flds.constant_unit_m(d)
    v = SpectralField.zeros(d, Rank.VEC2)
    split = llg_rhs_expanded(v, M, ExternalField("zero"), 0.0, P)
    assert np.abs(split.total.coeffs).max() < 1e-14


def test_expanded_rhs_harmonic_map_equilibrium():
    d = Domain(32)
    x, _ = d.grid()
    M = SpectralField.from_grid(d, Rank.VEC3, np.stack([np.sin(x), np.cos(x), np.zeros_like(x)]))
    v = SpectralField.zeros(d, Rank.VEC2)
    split = llg_rhs_expanded(v, M, ExternalField("zero"), 0.0, P)
    assert np.abs(split.total.to_grid()).max() < 1e-12


def test_form_equivalence_on_projected_unit_fields():
    d = Domain(32)
    hx = ExternalField("uniform_constant", h0=0.5)
    for seed in range(10):
        M = flds.unit_magnetization(d, band=2, amplitude=0.2, seed=seed)
        v = flds.random_divfree_velocity(d, band=2, amplitude=0.2, seed=seed + 50)
        He = effective_field(M, hx, 0.0, P)
        rc = llg_rhs_cross(v, M, He, P)
        re = llg_rhs_expanded(v, M, hx, 0.0, P).total
        lap_inf = np.abs(d.backward(-d.k2 * M.coeffs)).max()
        assert np.abs(rc.to_grid() - re.to_grid()).max() <= 1e-9 * (1.0 + lap_inf)


def test_expanded_rhs_rejects_non_normalized_parameters():
    d = Domain(16)
    M = flds.constant_unit_m(d)
    v = SpectralField.zeros(d, Rank.VEC2)
    bad = ModelParams(gamma_llg=2.0)
    with pytest.raises(UnsupportedParameters):
        llg_rhs_expanded(v, M, ExternalField("zero"), 0.0, bad)


def test_llg_relaxation_dissipation_sign():
    # <relaxation terms, -H_eff> = int |M.H|^2 - |H|^2 <= 0 on the unit sphere
    d = Domain(32)
    hx = ExternalField("uniform_constant", h0=0.8)
    pe = PadEval(d, "half")
    for seed in range(20):
        M = flds.unit_magnetization(d, band=2, amplitude=0.25, seed=seed)
        He = effective_field(M, hx, 0.0, P)
        Mg, Hg = pe.grid(M.coeffs), pe.grid(He.coeffs)
        mh = np.einsum("kxy,kxy->xy", Mg, Hg)
        val = pe.quad(mh * mh - np.sum(Hg * Hg, axis=0))
        assert val <= 1e-10


# -- stress, body force, transport -------------------------------------------------


def test_stress_zero_state():
    d = Domain(16)
    M = flds.constant_unit_m(d)
    F = SpectralField.zeros(d, Rank.TENSOR2)
    T = magnetoelastic_stress(M, F, P)
    assert np.abs(T.coeffs).max() < 1e-14


def test_stress_identity_deformation():
    d = Domain(16)
    M = flds.constant_unit_m(d)
    T = magnetoelastic_stress(M, flds.identity_tensor(d), P).to_grid()
    c = 2.0 * P.elastic.c_e
    assert np.allclose(T[0], c, atol=1e-13) and np.allclose(T[3], c, atol=1e-13)
    assert np.abs(T[1]).max() < 1e-13 and np.abs(T[2]).max() < 1e-13


def test_stress_gradient_outer_product_hand_expanded():
    d = Domain(32)
    x, _ = d.grid()
    M = SpectralField.from_grid(d, Rank.VEC3, np.stack([np.sin(x), np.cos(x), np.zeros_like(x)]))
    F = SpectralField.zeros(d, Rank.TENSOR2)
    T = magnetoelastic_stress(M, F, P).to_grid()
    # grad M (.) grad M = diag(1, 0), scaled by -2A = -1
    assert np.allclose(T[0], -1.0, atol=1e-12)
    for c in (1, 2, 3):
        assert np.abs(T[c]).max() < 1e-12


def test_stress_outer_product_part_symmetric():
    d = Domain(32)
    M = flds.unit_magnetization(d, band=3, amplitude=0.4, seed=7)
    F = SpectralField.zeros(d, Rank.TENSOR2)
    T = magnetoelastic_stress(M, F, P)
    assert np.abs(T.coeffs[1] - T.coeffs[2]).max() < 1e-13


def test_body_force_uniform_field_vanishes():
    d = Domain(16)
    M = flds.unit_magnetization(d, band=2, amplitude=0.2, seed=8)
    f = body_force(M, ExternalField("uniform_constant", h0=3.0), 0.0, P)
    assert np.abs(f.coeffs).max() == 0.0


def test_body_force_sawtooth_constant_gradient():
    d = Domain(32)
    alpha = 0.45
    hx = ExternalField("spatial_gradient", h0=alpha, direction=(1.0, 0.0, 0.0))
    M = flds.constant_unit_m(d, (1.0, 0.0, 0.0))
    f = body_force(M, hx, 0.0, P).to_grid()
    # closed-form off-seam gradient used globally: f = (alpha, 0)
    assert np.allclose(f[0], alpha, atol=1e-12)
    assert np.abs(f[1]).max() < 1e-12


def test_body_force_matches_quadrature_oracle():
    d = Domain(32)
    hx = ExternalField("spatial_gradient", h0=0.3, direction=(0.6, 0.8, 0.0))
    M = flds.unit_magnetization(d, band=2, amplitude=0.3, seed=9)
    f = body_force(M, hx, 0.0, P)
    G = hx.evaluate_grad(d, 0.0)[:, :, 0, 0]
    Mg = M.to_grid()
    expect = np.einsum("ka,kxy->axy", G, Mg)
    assert np.abs(f.to_grid() - expect).max() < 1e-11


def test_transport_rhs_pure_heat_flow():
    d = Domain(32)
    F = flds.random_field(d, Rank.TENSOR2, band=4, amplitude=0.5, seed=10)
    v = SpectralField.zeros(d, Rank.VEC2)
    split = transport_rhs_F(v, F, P)
    assert np.abs(split.nonstiff.coeffs).max() < 1e-13
    assert np.abs(split.stiff.coeffs + P.kappa * d.k2 * F.coeffs).max() < 1e-14


def test_transport_rhs_constant_f_gives_velocity_gradient():
    d = Domain(32)
    v = flds.random_divfree_velocity(d, band=2, amplitude=0.4, seed=11)
    split = transport_rhs_F(v, flds.identity_tensor(d), P)
    from magnetoelastic.domain import component_gradients
    gradv = component_gradients(v.coeffs, d).reshape(4, d.n, d.n)
    # (grad v) I = grad v with (i, j) element d_j v_i
    assert np.abs(split.nonstiff.coeffs - gradv).max() < 1e-12


def test_transport_rhs_matches_refined_grid_oracle():
    d, d2 = Domain(32), Domain(64)
    v = flds.random_divfree_velocity(d, band=3, amplitude=0.4, seed=12)
    F = flds.random_field(d, Rank.TENSOR2, band=3, amplitude=0.6, seed=13)
    a = transport_rhs_F(v, F, P).total
    b = transport_rhs_F(refine(v, d2), refine(F, d2), P).total
    assert np.abs(refine(a, d2).coeffs - b.coeffs).max() < 1e-11


# -- Galerkin tensors ----------------------------------------------------------------


def test_convection_single_mode_self_advection_zero():
    d = Domain(32)
    t = assemble_convection_tensor(VelocityBasis(d, 1))
    assert abs(t.conv[0, 0, 0]) < 1e-14


def test_convection_skew_symmetry():
    d = Domain(32)
    t = assemble_convection_tensor(VelocityBasis(d, 20))
    A = t.conv
    assert np.abs(A + A.transpose(2, 1, 0)).max() < 1e-12


def test_convection_cubic_contraction_vanishes():
    d = Domain(32)
    t = assemble_convection_tensor(VelocityBasis(d, 20))
    rng = np.random.default_rng(14)
    for _ in range(5):
        g = rng.standard_normal(20)
        val = abs(np.einsum("ijk,i,j,k->", t.conv, g, g, g))
        assert val <= 1e-11 * np.linalg.norm(g) ** 3


def test_convection_capacity_error():
    d = Domain(32)
    with pytest.raises(CapacityError):
        assemble_convection_tensor(VelocityBasis(d, 20), memory_budget=1024)


def test_convection_quadrature_exactness_guard():
    d = Domain(8)
    # enough modes to pull in |k|_inf = 3, violating 3 max|k| < n on n = 8
    with pytest.raises(ConfigurationError):
        assemble_convection_tensor(VelocityBasis(d, 30))


# -- stress forcing -------------------------------------------------------------------


def test_stress_forcing_zero_configurations():
    d = Domain(32)
    basis = VelocityBasis(d, 12)
    tensors = assemble_convection_tensor(basis)
    hx = ExternalField("uniform_constant", h0=1.0)
    M = flds.constant_unit_m(d)
    F0 = SpectralField.zeros(d, Rank.TENSOR2)
    assert np.abs(stress_forcing(F0, M, hx, 0.0, tensors, P)).max() < 1e-13
    # identity deformation pairs to zero against divergence-free modes
    assert np.abs(stress_forcing(flds.identity_tensor(d), M, hx, 0.0, tensors, P)).max() < 1e-13


def test_stress_forcing_matches_direct_quadrature():
    d = Domain(32)
    basis = VelocityBasis(d, 12)
    tensors = assemble_convection_tensor(basis)
    hx = ExternalField("spatial_gradient", h0=0.2, direction=(1.0, 0.5, 0.0))
    M = flds.unit_magnetization(d, band=2, amplitude=0.3, seed=15)
    F = flds.random_field(d, Rank.TENSOR2, band=2, amplitude=0.5, seed=16)
    D = stress_forcing(F, M, hx, 0.0, tensors, P)

    pe = PadEval(d, "half")
    from magnetoelastic import kernels
    from magnetoelastic.domain import component_gradients
    S = 2.0 * P.a_exch * kernels.odot(pe.grad_grid(M.coeffs)) \
        - kernels.ff_t(pe.grid(F.coeffs), 2.0 * P.elastic.c_e)
    G = hx.evaluate_grad(d, 0.0)[:, :, 0, 0]
    fg = np.einsum("ka,kxy->axy", G, pe.grid(M.coeffs))
    w = (d.l / pe.np_) ** 2
    for i in range(basis.m):
        xi = basis.coeffs_of_mode(i)
        xig = d.to_padded_grid(xi, pe.np_)
        gxig = d.to_padded_grid(component_gradients(xi, d), pe.np_).reshape(4, pe.np_, pe.np_)
        direct = w * (np.sum(S * gxig) + np.sum(fg * xig))
        assert abs(D[i] - direct) < 1e-11
