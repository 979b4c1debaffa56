"""Initial-state presets wired to the run configuration."""

from __future__ import annotations

import numpy as np

from . import fields as flds
from .bases import VelocityBasis
from .config import RunConfig
from .domain import ConfigurationError, Domain
from .integrators import SimState


def build_initial_state(cfg: RunConfig, domain: Domain, basis: VelocityBasis) -> SimState:
    if cfg.preset == "zero":
        return zero_state(domain, basis)
    if cfg.preset == "taylor_green":
        return taylor_green_state(domain, basis)
    if cfg.preset == "generic_small":
        return generic_small_state(domain, basis, seed=cfg.seed, amp_v=cfg.amp_v,
                                   amp_m=cfg.amp_m, band=cfg.band)
    if cfg.preset == "file":
        from .snapshots import read_snapshot
        return read_snapshot(cfg.file, domain, basis)
    raise ConfigurationError(f"unknown initial preset {cfg.preset!r}")


def zero_state(domain: Domain, basis: VelocityBasis) -> SimState:
    """Quiescent equilibrium: v = 0, F = 0, constant unit magnetization."""
    return SimState(0.0, np.zeros(basis.m),
                    np.zeros((4, domain.n, domain.n), dtype=complex),
                    flds.constant_unit_m(domain).coeffs, domain, basis)


def taylor_green_state(domain: Domain, basis: VelocityBasis) -> SimState:
    """Decoupled vortex benchmark: closed-form decaying velocity, F = 0,
    constant magnetization, no applied field."""
    g = basis.project(flds.taylor_green_velocity(domain))
    return SimState(0.0, g, np.zeros((4, domain.n, domain.n), dtype=complex),
                    flds.constant_unit_m(domain).coeffs, domain, basis)


def generic_small_state(domain: Domain, basis: VelocityBasis, seed: int = 0,
                        amp_v: float = 0.05, amp_m: float = 0.1, band: int = 1) -> SimState:
    """Seeded small-data coupled state: gentle divergence-free velocity,
    smooth unit magnetization, identity deformation gradient."""
    v0 = flds.random_divfree_velocity(domain, band=band, amplitude=amp_v, seed=seed * 3 + 11)
    M0 = flds.unit_magnetization(domain, band=band, amplitude=amp_m, seed=seed * 3 + 12)
    g = basis.project(v0)
    return SimState(0.0, g, flds.identity_tensor(domain).coeffs, M0.coeffs, domain, basis)
