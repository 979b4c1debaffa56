"""Real trigonometric eigenbases on the torus.

VelocityBasis: divergence-free velocity modes (transverse polarization), two
real modes (cos/sin) per integer wavevector in the half-space k_x > 0 or
(k_x = 0, k_y > 0).  They are orthonormal in L^2 and diagonalize the Stokes
operator with eigenvalue |k|^2 (no pressure term arises on the torus).  The
k = 0 Galilean mode is excluded so every represented velocity has zero mean.

ScalarBasis: the analogous scalar modes (including the constant), ordered by
the eigenvalue of either the (negative) Laplacian, |k|^2, or of the
biharmonic-plus-identity operator, |k|^4 + 1.

Mode ordering is deterministic: ascending integer eigenvalue key, ties broken
lexicographically by (k_x, k_y, trig kind) with cos before sin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import ConfigurationError, Domain, Rank, SpectralField

COS, SIN = 0, 1


def _half_space_wavevectors(max_abs: int):
    """Integer wavevectors with k_x > 0, or k_x = 0 and k_y > 0."""
    out = []
    for kx in range(0, max_abs + 1):
        for ky in range(-max_abs, max_abs + 1):
            if kx == 0 and ky <= 0:
                continue
            out.append((kx, ky))
    return out


@dataclass(frozen=True)
class Mode:
    k: tuple[int, int]      # integer wavevector
    kind: int               # COS or SIN
    pol: tuple[float, float] | None  # unit transverse polarization (None for scalar modes)

    @property
    def k2int(self) -> int:
        return self.k[0] ** 2 + self.k[1] ** 2


def _sorted_modes(domain: Domain, m: int, vector: bool, eig_key):
    max_abs = domain.n // 2 - 1
    entries = []
    if not vector:
        entries.append(Mode((0, 0), COS, None))
    for k in _half_space_wavevectors(max_abs):
        if vector:
            norm = np.hypot(*k)
            pol = (-k[1] / norm, k[0] / norm)
        else:
            pol = None
        for kind in (COS, SIN):
            entries.append(Mode(k, kind, pol))
    entries.sort(key=lambda md: (eig_key(md.k2int), md.k[0], md.k[1], md.kind))
    if m > len(entries):
        raise ConfigurationError(
            f"requested {m} modes but only {len(entries)} are resolvable below Nyquist on n={domain.n}"
        )
    return entries[:m]


class VelocityBasis:
    """First m divergence-free real Fourier modes, orthonormal in L^2."""

    def __init__(self, domain: Domain, m: int):
        if m < 1:
            raise ConfigurationError("velocity basis needs at least one mode")
        self.domain = domain
        self.m = m
        self.modes = _sorted_modes(domain, m, vector=True, eig_key=lambda q: q)
        scale = (2.0 * np.pi / domain.l) ** 2
        self.eigenvalues = np.array([scale * md.k2int for md in self.modes])
        self.max_abs_k = max(max(abs(md.k[0]), abs(md.k[1])) for md in self.modes)

    # -- spectral assembly / projection --------------------------------------

    def _amp(self) -> float:
        # L^2-normalized amplitude of sqrt(2)/l * trig(k.x)
        return np.sqrt(2.0) / self.domain.l

    def coeffs_of_mode(self, i: int) -> np.ndarray:
        """Spectral coefficients (2, n, n) of mode i."""
        out = np.zeros((2, self.domain.n, self.domain.n), dtype=complex)
        self.add_to_coeffs(out, i, 1.0)
        return out

    def add_to_coeffs(self, coeffs: np.ndarray, i: int, weight: float) -> None:
        md = self.modes[i]
        n = self.domain.n
        ip, jp = md.k[0] % n, md.k[1] % n
        im, jm = (-md.k[0]) % n, (-md.k[1]) % n
        half = 0.5 * self._amp() * weight
        if md.kind == COS:
            cp = half
        else:
            cp = -1j * half
        for c in range(2):
            coeffs[c, ip, jp] += cp * md.pol[c]
            coeffs[c, im, jm] += np.conj(cp) * md.pol[c]

    def synthesize_coeffs(self, g: np.ndarray) -> np.ndarray:
        """Velocity spectral coefficients for coefficient vector g (length m)."""
        out = np.zeros((2, self.domain.n, self.domain.n), dtype=complex)
        for i in range(self.m):
            if g[i] != 0.0:
                self.add_to_coeffs(out, i, g[i])
        return out

    def grid_mode(self, i: int) -> np.ndarray:
        return self.domain.backward(self.coeffs_of_mode(i))

    def project_coeffs(self, uhat: np.ndarray) -> np.ndarray:
        """L^2 inner products <u, xi_i> from velocity spectral coefficients."""
        g = np.empty(self.m)
        amp = np.sqrt(2.0) * self.domain.l
        n = self.domain.n
        for i, md in enumerate(self.modes):
            z = uhat[0, md.k[0] % n, md.k[1] % n] * md.pol[0] + uhat[1, md.k[0] % n, md.k[1] % n] * md.pol[1]
            g[i] = amp * (np.real(z) if md.kind == COS else -np.imag(z))
        return g

    def project(self, u: SpectralField) -> np.ndarray:
        if u.rank is not Rank.VEC2 or u.domain != self.domain:
            raise ConfigurationError("project expects a vec2 field on the basis domain")
        return self.project_coeffs(u.coeffs)

    def synthesize(self, g: np.ndarray) -> SpectralField:
        return SpectralField(self.domain, Rank.VEC2, self.synthesize_coeffs(np.asarray(g, dtype=float)))


class ScalarBasis:
    """Real scalar Fourier modes ordered by a chosen eigenvalue.

    operator="laplace":        eigenvalue |k|^2   (deformation-gradient system)
    operator="bilaplace_id":   eigenvalue |k|^4+1 (magnetization system)
    """

    def __init__(self, domain: Domain, m: int, operator: str = "laplace"):
        if operator == "laplace":
            eig_key = lambda q: q
            scale = (2.0 * np.pi / domain.l) ** 2
            eig = lambda q: scale * q
        elif operator == "bilaplace_id":
            eig_key = lambda q: q * q
            scale = (2.0 * np.pi / domain.l) ** 4
            eig = lambda q: scale * q * q + 1.0
        else:
            raise ConfigurationError(f"unknown operator {operator!r}")
        self.domain = domain
        self.m = m
        self.operator = operator
        self.modes = _sorted_modes(domain, m, vector=False, eig_key=eig_key)
        self.eigenvalues = np.array([eig(md.k2int) for md in self.modes])

    def _amp(self, md: Mode) -> float:
        if md.k == (0, 0):
            return 1.0 / self.domain.l
        return np.sqrt(2.0) / self.domain.l

    def coeffs_of_mode(self, i: int) -> np.ndarray:
        md = self.modes[i]
        n = self.domain.n
        out = np.zeros((1, n, n), dtype=complex)
        if md.k == (0, 0):
            out[0, 0, 0] = self._amp(md)
            return out
        half = 0.5 * self._amp(md)
        cp = half if md.kind == COS else -1j * half
        out[0, md.k[0] % n, md.k[1] % n] = cp
        out[0, (-md.k[0]) % n, (-md.k[1]) % n] = np.conj(cp)
        return out

    def grid_mode(self, i: int) -> np.ndarray:
        return self.domain.backward(self.coeffs_of_mode(i))[0]

    def project_coeffs(self, fhat: np.ndarray) -> np.ndarray:
        """L^2 inner products of a scalar field with the first m modes."""
        g = np.empty(self.m)
        n = self.domain.n
        for i, md in enumerate(self.modes):
            if md.k == (0, 0):
                g[i] = self.domain.l * np.real(fhat[0, 0])
                continue
            z = fhat[md.k[0] % n, md.k[1] % n]
            amp = np.sqrt(2.0) * self.domain.l
            g[i] = amp * (np.real(z) if md.kind == COS else -np.imag(z))
        return g
