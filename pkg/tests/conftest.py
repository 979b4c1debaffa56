"""Shared fixtures; the heavy small-data reference run is session-scoped and
reused by the ledger, bound-monitor, and weak-form acceptance tests."""

import pytest

from magnetoelastic import fields as flds
from magnetoelastic.bases import VelocityBasis
from magnetoelastic.coupler import FixedPointConfig, run
from magnetoelastic.domain import Domain
from magnetoelastic.integrators import SimState
from magnetoelastic.operators import assemble_convection_tensor
from magnetoelastic.params import ElasticLaw, ExternalField, ModelParams


@pytest.fixture(scope="session")
def domain32():
    return Domain(32)


@pytest.fixture(scope="session")
def basis16(domain32):
    return VelocityBasis(domain32, 16)


@pytest.fixture(scope="session")
def tensors16(basis16):
    return assemble_convection_tensor(basis16)


@pytest.fixture(scope="session")
def small_params():
    return ModelParams(nu=0.1, kappa=0.1, elastic=ElasticLaw(c_e=0.01))


def make_small_state(domain, basis, amp_v=0.05, amp_m=0.1, band=1, seed=0):
    v0 = flds.random_divfree_velocity(domain, band=band, amplitude=amp_v, seed=seed * 3 + 11)
    M0 = flds.unit_magnetization(domain, band=band, amplitude=amp_m, seed=seed * 3 + 12)
    return SimState(0.0, basis.project(v0), flds.identity_tensor(domain).coeffs,
                    M0.coeffs, domain, basis)


@pytest.fixture(scope="session")
def small_state_factory(domain32, basis16):
    def factory(seed=0, amp_v=0.05, amp_m=0.1, band=1):
        return make_small_state(domain32, basis16, amp_v, amp_m, band, seed)
    return factory


@pytest.fixture(scope="session")
def reference_run(domain32, basis16, tensors16, small_params):
    """Generic small-data coupled run: monolithic, T = 1, dt = 1e-3, no drive."""
    hext = ExternalField("zero")
    state = make_small_state(domain32, basis16)
    result = run(state, 1.0, 1e-3, FixedPointConfig(mode="monolithic"),
                 hext, tensors16, small_params)
    assert result.ok
    return result


@pytest.fixture(scope="session")
def reference_run_half_dt(domain32, basis16, tensors16, small_params):
    """The reference run repeated at dt = 5e-4 (order studies)."""
    hext = ExternalField("zero")
    state = make_small_state(domain32, basis16)
    result = run(state, 1.0, 5e-4, FixedPointConfig(mode="monolithic"),
                 hext, tensors16, small_params)
    assert result.ok
    return result
