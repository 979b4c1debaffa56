"""Spectral core: transforms, calculus, projection, inner products, dealiasing."""

import numpy as np
import pytest

from magnetoelastic.domain import (ConfigurationError, Domain, Rank,
                                   SpectralField, dealias, dealias_cutoff,
                                   divergence, gradient, l2_inner,
                                   l2_inner_grid, laplacian, leray_project)
from magnetoelastic.fields import random_field
from magnetoelastic.operators import PadEval


def test_domain_validation():
    with pytest.raises(ConfigurationError):
        Domain(7)
    with pytest.raises(ConfigurationError):
        Domain(24)
    with pytest.raises(ConfigurationError):
        Domain(32, l=-1.0)


def test_constant_field_single_zero_mode():
    d = Domain(16)
    f = SpectralField.from_grid(d, Rank.SCALAR, np.ones((16, 16)))
    assert abs(f.coeffs[0, 0, 0] - 1.0) < 1e-14
    rest = f.coeffs.copy()
    rest[0, 0, 0] = 0.0
    assert np.abs(rest).max() < 1e-14


def test_sin_mode_has_two_conjugate_coefficients():
    d = Domain(16)
    x, _ = d.grid()
    f = SpectralField.from_grid(d, Rank.SCALAR, np.sin(x))
    nonzero = np.argwhere(np.abs(f.coeffs[0]) > 1e-12)
    assert len(nonzero) == 2
    assert abs(f.coeffs[0, 1, 0] - (-0.5j)) < 1e-14
    assert abs(f.coeffs[0, -1, 0] - (0.5j)) < 1e-14


def test_transform_round_trip_random():
    d = Domain(32)
    rng = np.random.default_rng(3)
    g = rng.standard_normal((1, 32, 32))
    f = SpectralField.from_grid(d, Rank.SCALAR, g)
    assert np.abs(f.to_grid() - g).max() < 1e-13


def test_transform_shape_and_reality_checks():
    d = Domain(16)
    with pytest.raises(ConfigurationError):
        d.forward(np.zeros((8, 8)))
    with pytest.raises(ConfigurationError):
        d.forward(np.zeros((16, 16), dtype=complex))
    with pytest.raises(ConfigurationError):
        d.backward(np.zeros((8, 8), dtype=complex))


def test_gradient_of_sin():
    d = Domain(16)
    x, _ = d.grid()
    f = SpectralField.from_grid(d, Rank.SCALAR, np.sin(x))
    g = gradient(f).to_grid()
    assert np.abs(g[0] - np.cos(x)).max() < 1e-13
    assert np.abs(g[1]).max() < 1e-13


def test_divergence_of_gradient_equals_laplacian():
    d = Domain(32)
    f = random_field(d, Rank.SCALAR, band=6, amplitude=1.0, seed=4)
    lhs = divergence(gradient(f))
    rhs = laplacian(f)
    assert np.abs(lhs.coeffs - rhs.coeffs).max() < 1e-12


def test_laplacian_eigenfunction():
    d = Domain(16)
    x, y = d.grid()
    f = SpectralField.from_grid(d, Rank.SCALAR, np.sin(x) * np.sin(y))
    assert np.abs(laplacian(f).to_grid() + 2.0 * f.to_grid()).max() < 1e-13


def test_calculus_exact_on_trig_polynomials():
    d = Domain(32)
    x, y = d.grid()
    # below-Nyquist trig polynomial with exact derivatives
    f = np.cos(3 * x + 2 * y) + 0.5 * np.sin(7 * y)
    fx = -3 * np.sin(3 * x + 2 * y)
    fy = -2 * np.sin(3 * x + 2 * y) + 3.5 * np.cos(7 * y)
    g = gradient(SpectralField.from_grid(d, Rank.SCALAR, f)).to_grid()
    assert np.abs(g[0] - fx).max() < 1e-12
    assert np.abs(g[1] - fy).max() < 1e-12


def test_leray_annihilates_gradients():
    d = Domain(32)
    phi = random_field(d, Rank.SCALAR, band=4, amplitude=1.0, seed=5)
    gp = gradient(phi)
    assert np.abs(leray_project(gp).coeffs).max() < 1e-13


def test_leray_identity_on_divergence_free():
    d = Domain(32)
    u = leray_project(random_field(d, Rank.VEC2, band=5, amplitude=1.0, seed=6))
    pu = leray_project(u)
    assert np.abs(pu.coeffs - u.coeffs).max() < 1e-14


def test_leray_invariants_over_random_sample():
    d = Domain(32)
    for seed in range(100):
        u = random_field(d, Rank.VEC2, band=6, amplitude=1.0, seed=seed)
        pu = leray_project(u)
        assert np.abs(leray_project(pu).coeffs - pu.coeffs).max() <= 1e-13
        assert np.abs(divergence(pu).to_grid()).max() <= 1e-12


def test_leray_self_adjoint():
    d = Domain(32)
    u = random_field(d, Rank.VEC2, band=5, amplitude=1.0, seed=7)
    w = random_field(d, Rank.VEC2, band=5, amplitude=1.0, seed=8)
    assert abs(l2_inner(leray_project(u), w) - l2_inner(u, leray_project(w))) < 1e-12


def test_l2_inner_analytic_values():
    d = Domain(16)
    x, _ = d.grid()
    s = SpectralField.from_grid(d, Rank.SCALAR, np.sin(x))
    c = SpectralField.from_grid(d, Rank.SCALAR, np.cos(x))
    assert abs(l2_inner(s, s) - 2.0 * np.pi**2) < 1e-12
    assert abs(l2_inner(s, c)) < 1e-13


def test_l2_inner_parseval_vs_grid_quadrature():
    d = Domain(32)
    a = random_field(d, Rank.VEC3, band=7, amplitude=1.0, seed=9)
    b = random_field(d, Rank.VEC3, band=7, amplitude=1.0, seed=10)
    assert abs(l2_inner(a, b) - l2_inner_grid(a, b)) < 1e-12
    with pytest.raises(ConfigurationError):
        l2_inner(a, random_field(d, Rank.VEC2, band=3, amplitude=1.0, seed=11))


def test_dealias_keeps_low_modes():
    d = Domain(32)
    f = random_field(d, Rank.SCALAR, band=5, amplitude=1.0, seed=12)
    g = dealias(f, "two_thirds")
    assert np.abs(g.coeffs - f.coeffs).max() < 1e-15


def test_dealias_removes_aliased_square():
    d = Domain(32)
    k = dealias_cutoff(32, "two_thirds")  # = 10, just below the cutoff
    x, _ = d.grid()
    prod = np.sin(k * x) ** 2  # = 1/2 - cos(2k x)/2; 2k aliases on the grid
    f = dealias(SpectralField.from_grid(d, Rank.SCALAR, prod), "two_thirds")
    exact = np.zeros((1, 32, 32), dtype=complex)
    exact[0, 0, 0] = 0.5  # the sub-cutoff part of the exact expansion
    assert np.abs(f.coeffs - exact).max() < 1e-13


def test_half_rule_cubic_matches_refined_grid():
    d32, d64 = Domain(32), Domain(64)
    band = dealias_cutoff(32, "half")  # inputs resolvable under the half rule
    M32 = random_field(d32, Rank.VEC3, band=band, amplitude=0.7, seed=13)
    M64 = SpectralField(d64, Rank.VEC3, d64.zero_nyquist(d32.pad(M32.coeffs, 64)))

    def cubic(M, pe):
        gradM = pe.grad_grid(M.coeffs)
        g2 = np.einsum("kaxy,kaxy->xy", gradM, gradM)
        return pe.spec(g2 * pe.grid(M.coeffs))

    c32 = cubic(M32, PadEval(d32, "half"))
    # n = 64 leaves the cubic fully resolved even without padding
    c64 = cubic(M64, PadEval(d64, "half"))
    c64_on_32 = d32.unpad(c64, 64)
    assert np.abs(c32 - c64_on_32).max() < 1e-12


def test_spectral_field_shape_validation():
    d = Domain(16)
    with pytest.raises(ConfigurationError):
        SpectralField(d, Rank.VEC2, np.zeros((3, 16, 16), dtype=complex))
