"""Seeded random band-limited field generators used by presets and tests."""

from __future__ import annotations

import numpy as np

from .domain import Domain, Rank, SpectralField, leray_project


def random_band_coeffs(domain: Domain, ncomp: int, band: int, rng: np.random.Generator,
                       include_mean: bool = False) -> np.ndarray:
    """Conjugate-symmetric coefficients supported on 0 < |k|_inf <= band."""
    n = domain.n
    out = np.zeros((ncomp, n, n), dtype=complex)
    for kx in range(-band, band + 1):
        for ky in range(-band, band + 1):
            if kx == 0 and ky == 0:
                continue
            z = rng.standard_normal(ncomp) + 1j * rng.standard_normal(ncomp)
            out[:, kx % n, ky % n] += 0.5 * z
            out[:, (-kx) % n, (-ky) % n] += 0.5 * np.conj(z)
    if include_mean:
        out[:, 0, 0] = rng.standard_normal(ncomp)
    return out


def random_field(domain: Domain, rank: Rank, band: int = 3, amplitude: float = 1.0,
                 seed: int = 0, include_mean: bool = False) -> SpectralField:
    """Random smooth field scaled so its max-norm is `amplitude`."""
    rng = np.random.default_rng(seed)
    coeffs = random_band_coeffs(domain, rank.ncomp, band, rng, include_mean)
    f = SpectralField(domain, rank, coeffs)
    peak = np.abs(f.to_grid()).max()
    if peak > 0:
        f.coeffs *= amplitude / peak
    return f


def random_divfree_velocity(domain: Domain, band: int = 2, amplitude: float = 0.1,
                            seed: int = 0) -> SpectralField:
    """Mean-zero divergence-free random velocity with given max-norm."""
    u = random_field(domain, Rank.VEC2, band, 1.0, seed)
    u = leray_project(u)
    peak = np.abs(u.to_grid()).max()
    if peak > 0:
        u.coeffs *= amplitude / peak
    return u


def unit_magnetization(domain: Domain, band: int = 2, amplitude: float = 0.2,
                       seed: int = 0) -> SpectralField:
    """Smooth unit-length magnetization via random rotation angles.

    M = (sin th cos ph, sin th sin ph, cos th) with band-limited angles, so
    |M| = 1 holds identically; gentle amplitudes keep the spectral tail of the
    composition at machine level on desk-scale grids.
    """
    rng = np.random.default_rng(seed)
    th = domain.backward(random_band_coeffs(domain, 1, band, rng))[0]
    ph = domain.backward(random_band_coeffs(domain, 1, band, rng))[0]
    for ang in (th, ph):
        peak = np.abs(ang).max()
        if peak > 0:
            ang *= amplitude / peak
    grid = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
    return SpectralField.from_grid(domain, Rank.VEC3, grid)


def normalize_pointwise(M: SpectralField) -> SpectralField:
    """Project a vec3 field onto the unit sphere at every grid node."""
    grid = M.to_grid()
    norm = np.sqrt(np.sum(grid * grid, axis=0))
    if np.any(norm == 0.0):
        raise ValueError("cannot normalize a field that vanishes at a grid node")
    return SpectralField.from_grid(M.domain, Rank.VEC3, grid / norm)


def identity_tensor(domain: Domain) -> SpectralField:
    """The constant identity deformation gradient."""
    coeffs = np.zeros((4, domain.n, domain.n), dtype=complex)
    coeffs[0, 0, 0] = 1.0
    coeffs[3, 0, 0] = 1.0
    return SpectralField(domain, Rank.TENSOR2, coeffs)


def constant_unit_m(domain: Domain, direction=(0.0, 0.0, 1.0)) -> SpectralField:
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    coeffs = np.zeros((3, domain.n, domain.n), dtype=complex)
    coeffs[:, 0, 0] = d
    return SpectralField(domain, Rank.VEC3, coeffs)


def taylor_green_velocity(domain: Domain) -> SpectralField:
    """v = (sin x cos y, -cos x sin y) scaled to the box, a closed-form
    decaying solution of 2D Navier-Stokes with rate 2 nu (2 pi / l)^2."""
    x, y = domain.grid()
    s = 2.0 * np.pi / domain.l
    grid = np.stack([np.sin(s * x) * np.cos(s * y), -np.cos(s * x) * np.sin(s * y)])
    return SpectralField.from_grid(domain, Rank.VEC2, grid)
