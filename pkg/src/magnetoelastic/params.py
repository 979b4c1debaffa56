"""Constitutive constants, the quadratic elastic stored-energy law, and
closed-form external magnetic field presets (with exact time derivative and
spatial gradient)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import ConfigurationError, Domain


@dataclass(frozen=True)
class ElasticLaw:
    """Frame-indifferent quadratic stored energy W(F) = c_e |F|^2.

    Satisfies: W(RF) = W(F) for rotations R, W'(0) = 0, 2-growth with
    C1 = c_e, 1-growth of W' with C2 = 2 c_e, bounded W'' and uniform
    convexity (W''(Xi) B) . B = 2 c_e |B|^2, so the convexity constant is
    a = 2 c_e.
    """

    kind: str = "quadratic"
    c_e: float = 0.01

    def __post_init__(self):
        if self.kind != "quadratic":
            raise ConfigurationError(f"unsupported elastic law {self.kind!r}")
        if not self.c_e > 0:
            raise ConfigurationError("elastic coefficient c_e must be positive")

    @property
    def convexity(self) -> float:
        return 2.0 * self.c_e

    def energy_density(self, F: np.ndarray) -> np.ndarray:
        """W(F) pointwise; F has shape (4, ...) in row-major component order."""
        return self.c_e * np.sum(F * F, axis=0)

    def stress(self, F: np.ndarray) -> np.ndarray:
        """W'(F) = 2 c_e F, same shape as F."""
        return 2.0 * self.c_e * F

    def hessian_quadratic_form(self, B: np.ndarray) -> np.ndarray:
        """(W'' B) . B pointwise (independent of the base point)."""
        return 2.0 * self.c_e * np.sum(B * B, axis=0)


@dataclass(frozen=True)
class ModelParams:
    """All constitutive constants of the coupled system.

    Defaults follow the usual normalization A = 1/2, mu0 = gamma = lambda = 1;
    the expanded-form magnetization update requires exactly that normalization.
    """

    nu: float = 0.1
    kappa: float = 0.1
    a_exch: float = 0.5
    mu0: float = 1.0
    gamma_llg: float = 1.0
    lambda_llg: float = 1.0
    elastic: ElasticLaw = field(default_factory=ElasticLaw)

    def __post_init__(self):
        for name, positive in (("nu", self.nu), ("a_exch", self.a_exch),
                               ("gamma_llg", self.gamma_llg), ("lambda_llg", self.lambda_llg),
                               ("mu0", self.mu0)):
            if not positive > 0:
                raise ConfigurationError(f"parameter {name} must be positive, got {positive}")
        if self.kappa < 0:
            raise ConfigurationError(f"regularization kappa must be nonnegative, got {self.kappa}")

    @property
    def normalized_llg(self) -> bool:
        """True iff the expanded magnetization form applies (2A = mu0 = gamma = lambda = 1)."""
        return (
            abs(2.0 * self.a_exch - 1.0) < 1e-14
            and abs(self.mu0 - 1.0) < 1e-14
            and abs(self.gamma_llg - 1.0) < 1e-14
            and abs(self.lambda_llg - 1.0) < 1e-14
        )


class UnsupportedParameters(ValueError):
    """Parameter combination outside the regime an operation supports."""


PRESETS = ("zero", "uniform_constant", "uniform_sinusoidal_in_time", "spatial_gradient")


@dataclass(frozen=True)
class ExternalField:
    """Closed-form applied field H_ext(x, t) in R^3 with exact d/dt and grad.

    presets:
      zero                         H = 0
      uniform_constant             H = h0 * direction
      uniform_sinusoidal_in_time   H = h0 sin(omega t) * direction
      spatial_gradient             H = h0 * s(x_axis) * direction, with s the
                                   periodic sawtooth x - l/2 on [0, l); its
                                   gradient is reported as the constant
                                   off-seam value h0 (the distributional jump
                                   at the seam is dropped -- documented caveat)
    """

    preset: str = "zero"
    h0: float = 0.0
    omega: float = 0.0
    direction: tuple[float, float, float] = (0.0, 0.0, 1.0)
    grad_axis: int = 0

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigurationError(f"unknown external field preset {self.preset!r}")
        if self.grad_axis not in (0, 1):
            raise ConfigurationError("grad_axis must be 0 or 1")

    @property
    def is_zero(self) -> bool:
        return self.preset == "zero" or self.h0 == 0.0

    @property
    def is_uniform(self) -> bool:
        return self.preset in ("zero", "uniform_constant", "uniform_sinusoidal_in_time")

    def _dir(self) -> np.ndarray:
        return np.asarray(self.direction, dtype=float)

    def _sawtooth(self, domain: Domain, m: int) -> np.ndarray:
        x = domain.grid(m)[self.grad_axis]
        return x - 0.5 * domain.l

    def evaluate(self, domain: Domain, t: float, m: int | None = None) -> np.ndarray:
        """H_ext on the (optionally refined) grid, shape (3, m, m)."""
        m = m or domain.n
        d = self._dir()
        if self.preset == "zero":
            return np.zeros((3, m, m))
        if self.preset == "uniform_constant":
            return np.broadcast_to((self.h0 * d)[:, None, None], (3, m, m)).copy()
        if self.preset == "uniform_sinusoidal_in_time":
            return np.broadcast_to((self.h0 * np.sin(self.omega * t) * d)[:, None, None], (3, m, m)).copy()
        s = self._sawtooth(domain, m)
        return self.h0 * d[:, None, None] * s[None]

    def evaluate_dt(self, domain: Domain, t: float, m: int | None = None) -> np.ndarray:
        """Exact time derivative of H_ext on the grid."""
        m = m or domain.n
        if self.preset == "uniform_sinusoidal_in_time":
            d = self.h0 * self.omega * np.cos(self.omega * t) * self._dir()
            return np.broadcast_to(d[:, None, None], (3, m, m)).copy()
        return np.zeros((3, m, m))

    def evaluate_grad(self, domain: Domain, t: float, m: int | None = None) -> np.ndarray:
        """grad H_ext, shape (3, 2, m, m); identically zero for uniform presets."""
        m = m or domain.n
        out = np.zeros((3, 2, m, m))
        if self.preset == "spatial_gradient":
            d = self._dir()
            out[:, self.grad_axis] = self.h0 * d[:, None, None]
        return out

    # -- norms entering the smallness budget ---------------------------------

    def sup_l1_norm(self, domain: Domain, T: float, samples: int = 512) -> float:
        """sup over [0, T] of the spatial L^1 norm of |H_ext|."""
        if self.preset == "zero":
            return 0.0
        if self.preset == "uniform_constant":
            return abs(self.h0) * domain.area
        if self.preset == "uniform_sinusoidal_in_time":
            ts = np.linspace(0.0, T, samples)
            return abs(self.h0) * np.max(np.abs(np.sin(self.omega * ts))) * domain.area
        # sawtooth: int |s| dx = l^2/4 per unit transverse length
        return abs(self.h0) * domain.l**3 / 4.0

    def dt_l1l1_norm(self, domain: Domain, T: float, samples: int = 512) -> float:
        """int_0^T of the spatial L^1 norm of |d/dt H_ext|."""
        if self.preset != "uniform_sinusoidal_in_time":
            return 0.0
        ts = np.linspace(0.0, T, samples)
        vals = np.abs(self.h0 * self.omega * np.cos(self.omega * ts)) * domain.area
        return float(np.trapezoid(vals, ts))
