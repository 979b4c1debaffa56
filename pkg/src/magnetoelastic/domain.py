"""Periodic-box spectral core: grids, transforms, discrete vector calculus.

All fields live on a uniform n x n grid over the flat 2-torus [0, l)^2 and
carry a complex Fourier representation normalized so that

    f(x) = sum_k  fhat[k] * exp(i k . x),      k = (2*pi/l) * (integer modes)

i.e. the zero-mode coefficient equals the mean of the field.  With this
normalization Parseval reads  int |f|^2 dx = l^2 * sum |fhat|^2.

Nonlinear products are evaluated pseudospectrally on a zero-padded grid so
that they match exact Galerkin products for band-limited inputs (3/2 padding
is exact for quadratic terms, 2x padding also for cubic ones).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class ConfigurationError(ValueError):
    """Raised for invalid grid / basis / rule configurations."""


class Rank(enum.Enum):
    SCALAR = "scalar"
    VEC2 = "vec2"
    TENSOR2 = "tensor2x2"
    VEC3 = "vec3"

    @property
    def ncomp(self) -> int:
        return {Rank.SCALAR: 1, Rank.VEC2: 2, Rank.TENSOR2: 4, Rank.VEC3: 3}[self]


#: padding factor applied to pseudospectral products, per dealiasing rule
PAD_FACTOR = {"two_thirds": 1.5, "half": 2.0}


def dealias_cutoff(n: int, rule: str) -> int:
    """Largest retained |k|_inf for the truncation form of the rule."""
    if rule == "two_thirds":
        return (n - 1) // 3
    if rule == "half":
        return (n - 1) // 4
    raise ConfigurationError(f"unknown dealias rule {rule!r}")


@dataclass(frozen=True)
class Domain:
    """Uniform periodic grid with n points per axis on a box of side l."""

    n: int
    l: float = 2.0 * np.pi
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ConfigurationError(f"grid size n must be a power of two >= 8, got {self.n}")
        if not self.l > 0:
            raise ConfigurationError(f"box side l must be positive, got {self.l}")

    # -- geometry -----------------------------------------------------------

    @property
    def dx(self) -> float:
        return self.l / self.n

    @property
    def cell_area(self) -> float:
        return (self.l / self.n) ** 2

    @property
    def area(self) -> float:
        return self.l**2

    def axis(self, m: int | None = None) -> np.ndarray:
        m = m or self.n
        return np.arange(m) * (self.l / m)

    def grid(self, m: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate meshes (x, y), optionally on an m x m refinement."""
        x = self.axis(m)
        return np.meshgrid(x, x, indexing="ij")

    # -- wavenumbers --------------------------------------------------------

    def kint(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer mode numbers along each axis (numpy fft layout)."""
        k = np.fft.fftfreq(self.n, 1.0 / self.n)
        return np.meshgrid(k, k, indexing="ij")

    @property
    def kx(self) -> np.ndarray:
        return self._cached("kx", lambda: (2 * np.pi / self.l) * self.kint()[0])

    @property
    def ky(self) -> np.ndarray:
        return self._cached("ky", lambda: (2 * np.pi / self.l) * self.kint()[1])

    @property
    def k2(self) -> np.ndarray:
        """|k|^2, including the Nyquist row/column."""
        return self._cached("k2", lambda: self.kx**2 + self.ky**2)

    @property
    def ikx(self) -> np.ndarray:
        """i*k_x with the Nyquist mode zeroed (keeps odd derivatives real)."""
        return self._cached("ikx", lambda: 1j * np.where(np.abs(self.kint()[0]) == self.n // 2, 0.0, self.kx))

    @property
    def iky(self) -> np.ndarray:
        return self._cached("iky", lambda: 1j * np.where(np.abs(self.kint()[1]) == self.n // 2, 0.0, self.ky))

    def _cached(self, key, make):
        if key not in self._cache:
            self._cache[key] = make()
        return self._cache[key]

    # -- transforms ---------------------------------------------------------

    def forward(self, grid: np.ndarray) -> np.ndarray:
        """Grid samples -> normalized Fourier coefficients (last two axes)."""
        if grid.shape[-2:] != (self.n, self.n):
            raise ConfigurationError(f"grid shape {grid.shape} does not match n={self.n}")
        if np.iscomplexobj(grid):
            raise ConfigurationError("forward transform expects a real-valued field")
        return np.fft.fft2(grid) / self.n**2

    def backward(self, coeffs: np.ndarray) -> np.ndarray:
        """Normalized coefficients -> real grid samples."""
        if coeffs.shape[-2:] != (self.n, self.n):
            raise ConfigurationError(f"coefficient shape {coeffs.shape} does not match n={self.n}")
        return np.real(np.fft.ifft2(coeffs)) * self.n**2

    # -- padded evaluation --------------------------------------------------

    def pad_size(self, rule: str = "half") -> int:
        return int(round(self.n * PAD_FACTOR[rule]))

    def _band_slices(self):
        h = self.n // 2 - 1
        return slice(0, h + 1), slice(-h, None)

    def pad(self, coeffs: np.ndarray, m: int) -> np.ndarray:
        """Embed n x n coefficients into an m x m spectral array (m >= n).

        The Nyquist row/column of the source is dropped; simulation fields are
        kept Nyquist-free by construction.
        """
        pos, neg = self._band_slices()
        out = np.zeros(coeffs.shape[:-2] + (m, m), dtype=complex)
        out[..., pos, pos] = coeffs[..., pos, pos]
        out[..., pos, neg] = coeffs[..., pos, neg]
        out[..., neg, pos] = coeffs[..., neg, pos]
        out[..., neg, neg] = coeffs[..., neg, neg]
        return out

    def unpad(self, coeffs: np.ndarray, m: int) -> np.ndarray:
        """Restrict m x m coefficients back to the n x n band (Nyquist-free)."""
        pos, neg = self._band_slices()
        out = np.zeros(coeffs.shape[:-2] + (self.n, self.n), dtype=complex)
        out[..., pos, pos] = coeffs[..., pos, pos]
        out[..., pos, neg] = coeffs[..., pos, neg]
        out[..., neg, pos] = coeffs[..., neg, pos]
        out[..., neg, neg] = coeffs[..., neg, neg]
        return out

    def to_padded_grid(self, coeffs: np.ndarray, m: int) -> np.ndarray:
        """Evaluate coefficients on an m x m refinement of the grid."""
        if m == self.n:
            return self.backward(coeffs)
        return np.real(np.fft.ifft2(self.pad(coeffs, m))) * m**2

    def from_padded_grid(self, grid: np.ndarray, m: int) -> np.ndarray:
        """Transform an m x m grid and truncate to the n x n band."""
        if m == self.n:
            out = np.fft.fft2(grid) / m**2
            return self.zero_nyquist(out)
        return self.unpad(np.fft.fft2(grid) / m**2, m)

    def zero_nyquist(self, coeffs: np.ndarray) -> np.ndarray:
        out = coeffs.copy()
        out[..., self.n // 2, :] = 0.0
        out[..., :, self.n // 2] = 0.0
        return out


# -- SpectralField ------------------------------------------------------------


@dataclass
class SpectralField:
    """Fourier coefficients of a real field of a given rank on a Domain.

    coeffs has shape (ncomp, n, n); component order for TENSOR2 is row-major
    (F11, F12, F21, F22).
    """

    domain: Domain
    rank: Rank
    coeffs: np.ndarray

    def __post_init__(self):
        expect = (self.rank.ncomp, self.domain.n, self.domain.n)
        if self.coeffs.shape != expect:
            raise ConfigurationError(f"coefficient shape {self.coeffs.shape}, expected {expect}")

    @classmethod
    def from_grid(cls, domain: Domain, rank: Rank, grid: np.ndarray) -> "SpectralField":
        grid = np.asarray(grid, dtype=float)
        if grid.ndim == 2:
            grid = grid[None]
        return cls(domain, rank, domain.forward(grid))

    @classmethod
    def zeros(cls, domain: Domain, rank: Rank) -> "SpectralField":
        return cls(domain, rank, np.zeros((rank.ncomp, domain.n, domain.n), dtype=complex))

    def to_grid(self) -> np.ndarray:
        return self.domain.backward(self.coeffs)

    def copy(self) -> "SpectralField":
        return SpectralField(self.domain, self.rank, self.coeffs.copy())

    def is_real_symmetric(self, tol: float = 1e-12) -> bool:
        """Check conjugate symmetry (real-valuedness in physical space)."""
        g = np.fft.ifft2(self.coeffs)
        return bool(np.abs(np.imag(g)).max() * self.domain.n**2 <= tol * max(1.0, np.abs(g).max() * self.domain.n**2))


# -- calculus -----------------------------------------------------------------


def gradient(f: SpectralField) -> SpectralField:
    """Spectral gradient.  SCALAR -> VEC2; VEC3 is not collapsed here."""
    if f.rank is not Rank.SCALAR:
        raise ConfigurationError("gradient is defined on scalar fields; use component_gradients otherwise")
    d = f.domain
    out = np.stack([d.ikx * f.coeffs[0], d.iky * f.coeffs[0]])
    return SpectralField(d, Rank.VEC2, out)


def component_gradients(coeffs: np.ndarray, domain: Domain) -> np.ndarray:
    """d_a f_c for every component: shape (ncomp, 2, n, n)."""
    return np.stack([domain.ikx * coeffs, domain.iky * coeffs], axis=1)


def divergence(u: SpectralField) -> SpectralField:
    if u.rank is not Rank.VEC2:
        raise ConfigurationError("divergence expects a vec2 field")
    d = u.domain
    out = d.ikx * u.coeffs[0] + d.iky * u.coeffs[1]
    return SpectralField(d, Rank.SCALAR, out[None])


def laplacian(f: SpectralField) -> SpectralField:
    return SpectralField(f.domain, f.rank, -f.domain.k2 * f.coeffs)


def leray_project(u: SpectralField) -> SpectralField:
    """Mode-wise projection onto divergence-free fields, uhat -> uhat - k (k.uhat)/|k|^2."""
    if u.rank is not Rank.VEC2:
        raise ConfigurationError("leray projection expects a vec2 field")
    d = u.domain
    k2 = np.where(d.k2 == 0.0, 1.0, d.k2)
    kdotu = d.kx * u.coeffs[0] + d.ky * u.coeffs[1]
    out = np.stack([
        u.coeffs[0] - d.kx * kdotu / k2,
        u.coeffs[1] - d.ky * kdotu / k2,
    ])
    return SpectralField(d, Rank.VEC2, out)


def l2_inner(a: SpectralField, b: SpectralField) -> float:
    """L^2 pairing int_Omega a . b dx via the Parseval sum."""
    if a.domain != b.domain or a.rank is not b.rank:
        raise ConfigurationError("l2_inner requires matching domain and rank")
    return float(np.real(np.sum(a.coeffs * np.conj(b.coeffs))) * a.domain.area)


def l2_inner_grid(a: SpectralField, b: SpectralField) -> float:
    """Same pairing by grid quadrature (independent evaluation route)."""
    if a.domain != b.domain or a.rank is not b.rank:
        raise ConfigurationError("l2_inner requires matching domain and rank")
    return float(np.sum(a.to_grid() * b.to_grid()) * a.domain.cell_area)


def l2_norm(a: SpectralField) -> float:
    return float(np.sqrt(max(l2_inner(a, a), 0.0)))


def dealias(f: SpectralField, rule: str = "two_thirds") -> SpectralField:
    """Zero all modes with |k|_inf above the rule's cutoff."""
    d = f.domain
    c = dealias_cutoff(d.n, rule)
    ki, kj = d.kint()
    mask = (np.abs(ki) <= c) & (np.abs(kj) <= c)
    return SpectralField(d, f.rank, f.coeffs * mask)
