"""Constitutive operators, right-hand sides, and Galerkin coupling terms.

Nonlinear terms are evaluated pseudospectrally on a padded grid (see
domain.PAD_FACTOR); with the default "half" rule the padded products equal
exact Galerkin products for every quadratic and cubic term of the model.
Velocity coupling keeps explicit mode tensors: the convection array
A[i, j, k] = -int (xi_j . grad) xi_k . xi_i dx and the forcing vector
D[i] = <2A gradM (.) gradM - W'(F) F^T, grad xi_i> + <mu0 (grad H)^T M, xi_i>.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .bases import COS, VelocityBasis
from .domain import (ConfigurationError, Domain, Rank, SpectralField,
                     component_gradients)
from .params import ExternalField, ModelParams, UnsupportedParameters


class CapacityError(ConfigurationError):
    """Requested tensor exceeds the configured memory budget."""


# -- padded pseudospectral evaluation ------------------------------------------


class PadEval:
    """Helper bound to (domain, rule) that moves fields to/from the padded grid."""

    def __init__(self, domain: Domain, rule: str = "half"):
        self.domain = domain
        self.rule = rule
        self.np_ = domain.pad_size(rule)

    def grid(self, coeffs: np.ndarray) -> np.ndarray:
        return self.domain.to_padded_grid(coeffs, self.np_)

    def spec(self, grid: np.ndarray) -> np.ndarray:
        return self.domain.from_padded_grid(grid, self.np_)

    def grad_grid(self, coeffs: np.ndarray) -> np.ndarray:
        """Gradient grids, shape coeffs.shape[:-2] + (2, np, np)."""
        return self.grid(component_gradients(coeffs, self.domain))

    def lap_grid(self, coeffs: np.ndarray) -> np.ndarray:
        return self.grid(-self.domain.k2 * coeffs)

    def quad(self, values: np.ndarray) -> float:
        """Integral over the box of a padded-grid scalar."""
        return float(np.sum(values) * (self.domain.l / self.np_) ** 2)


# -- constitutive operators ----------------------------------------------------


def effective_field(M: SpectralField, hext: ExternalField, t: float, params: ModelParams) -> SpectralField:
    """H_eff = 2 A lap M + mu0 H_ext (spectral; H_ext sampled on the grid)."""
    d = M.domain
    out = -2.0 * params.a_exch * d.k2 * M.coeffs
    if not hext.is_zero:
        out = out + params.mu0 * d.forward(hext.evaluate(d, t))
    return SpectralField(d, Rank.VEC3, out)


def llg_rhs_cross(v: SpectralField, M: SpectralField, H_eff: SpectralField,
                  params: ModelParams, rule: str = "half") -> SpectralField:
    """Cross-product form:  -(v . grad) M - gamma M x H_eff - lambda M x (M x H_eff)."""
    pe = PadEval(M.domain, rule)
    rhs = kernels.llg_cross_rhs(pe.grid(v.coeffs), pe.grad_grid(M.coeffs),
                                pe.grid(M.coeffs), pe.grid(H_eff.coeffs),
                                params.gamma_llg, params.lambda_llg)
    return SpectralField(M.domain, Rank.VEC3, pe.spec(rhs))


@dataclass
class SplitRhs:
    """Right-hand side split into its stiff (diagonal spectral) linear summand
    and the remaining explicitly-treated part."""

    nonstiff: SpectralField
    stiff: SpectralField

    @property
    def total(self) -> SpectralField:
        return SpectralField(self.nonstiff.domain, self.nonstiff.rank,
                             self.nonstiff.coeffs + self.stiff.coeffs)


def llg_rhs_expanded(v: SpectralField, M: SpectralField, hext: ExternalField, t: float,
                     params: ModelParams, rule: str = "half") -> SplitRhs:
    """Expanded form valid on the unit sphere (requires 2A = mu0 = gamma = lambda = 1):

        -(v . grad) M - M x (lap M + H) + |grad M|^2 M + lap M - M (M . H) + H

    The lap M summand is returned separately as the stiff linear part.
    """
    if not params.normalized_llg:
        raise UnsupportedParameters(
            "expanded magnetization form requires 2A = mu0 = gamma = lambda = 1; "
            "use the cross-product form for general parameters")
    d = M.domain
    pe = PadEval(d, rule)
    H = hext.evaluate(d, t, pe.np_)
    rhs = kernels.llg_expanded_nonstiff(pe.grid(v.coeffs), pe.grad_grid(M.coeffs),
                                        pe.grid(M.coeffs), pe.lap_grid(M.coeffs), H)
    stiff = SpectralField(d, Rank.VEC3, -d.k2 * M.coeffs)
    return SplitRhs(SpectralField(d, Rank.VEC3, pe.spec(rhs)), stiff)


def magnetoelastic_stress(M: SpectralField, F: SpectralField, params: ModelParams,
                          rule: str = "half") -> SpectralField:
    """T_rev = -2 A grad M (.) grad M + W'(F) F^T  (row-major tensor field)."""
    pe = PadEval(M.domain, rule)
    odot = kernels.odot(pe.grad_grid(M.coeffs))
    wft = kernels.ff_t(pe.grid(F.coeffs), 2.0 * params.elastic.c_e)
    return SpectralField(M.domain, Rank.TENSOR2, pe.spec(-2.0 * params.a_exch * odot + wft))


def body_force(M: SpectralField, hext: ExternalField, t: float, params: ModelParams) -> SpectralField:
    """f = mu0 (grad H_ext)^T M, using the preset's closed-form gradient."""
    d = M.domain
    out = np.zeros((2, d.n, d.n), dtype=complex)
    if hext.preset == "spatial_gradient":
        G = hext.evaluate_grad(d, t)[:, :, 0, 0]  # constant (3, 2) matrix
        for a in range(2):
            out[a] = params.mu0 * np.einsum("k,kxy->xy", G[:, a], M.coeffs)
    return SpectralField(d, Rank.VEC2, out)


def transport_rhs_F(v: SpectralField, F: SpectralField, params: ModelParams,
                    rule: str = "half") -> SplitRhs:
    """Deformation-gradient transport: -(v . grad) F + grad v F, with the
    stiff kappa lap F summand returned separately."""
    d = F.domain
    pe = PadEval(d, rule)
    rhs = kernels.transport_f(pe.grid(v.coeffs), pe.grad_grid(F.coeffs),
                              pe.grad_grid(v.coeffs).reshape(2, 2, pe.np_, pe.np_),
                              pe.grid(F.coeffs))
    stiff = SpectralField(d, Rank.TENSOR2, -params.kappa * d.k2 * F.coeffs)
    return SplitRhs(SpectralField(d, Rank.TENSOR2, pe.spec(rhs)), stiff)


# -- Galerkin velocity coupling --------------------------------------------------


@dataclass
class GalerkinTensors:
    """Dense convection tensor A[i, j, k] plus cached mode pairing data."""

    basis: VelocityBasis
    conv: np.ndarray            # (m, m, m)
    mode_index: np.ndarray      # (m, 2) integer grid indices of +k_i
    mode_cvec: np.ndarray       # (m, 2) complex spectral amplitude of xi_i at +k_i
    mode_ikvec: np.ndarray      # (m, 2) i * physical wavevector

    @property
    def m(self) -> int:
        return self.basis.m

    def convection(self, g: np.ndarray) -> np.ndarray:
        """sum_{jk} A[i, j, k] g_j g_k."""
        return np.einsum("ijk,j,k->i", self.conv, g, g)


def assemble_convection_tensor(basis: VelocityBasis, memory_budget: int = 1 << 30) -> GalerkinTensors:
    """A[i, j, k] = -int (xi_j . grad) xi_k . xi_i dx by exact grid quadrature.

    Exactness requires every triple product to be resolvable on the n-grid,
    i.e. 3 * max |k|_inf < n.
    """
    d = basis.domain
    m, n = basis.m, d.n
    if 3 * basis.max_abs_k >= n:
        raise ConfigurationError(
            f"convection quadrature needs 3*max|k| < n; got max|k|={basis.max_abs_k} on n={n}")
    need = m * m * 2 * n * n * 8 + m**3 * 8 + m * 6 * n * n * 8
    if need > memory_budget:
        raise CapacityError(
            f"convection tensor for m={m}, n={n} needs ~{need/2**20:.0f} MiB, "
            f"budget is {memory_budget/2**20:.0f} MiB")

    xi = np.empty((m, 2, n, n))
    gxi = np.empty((m, 2, 2, n, n))
    for i in range(m):
        ci = basis.coeffs_of_mode(i)
        xi[i] = d.backward(ci)
        gxi[i] = d.backward(component_gradients(ci, d))
    # (xi_j . grad) xi_k, component b:  sum_a xi[j, a] * d_a xi[k, b]
    T = np.einsum("jaxy,kbaxy->jkbxy", xi, gxi)
    conv = -d.cell_area * np.einsum("jkbxy,ibxy->ijk", T, xi)

    idx = np.empty((m, 2), dtype=int)
    cvec = np.empty((m, 2), dtype=complex)
    ikvec = np.empty((m, 2), dtype=complex)
    scale = 2.0 * np.pi / d.l
    for i, md in enumerate(basis.modes):
        idx[i] = (md.k[0] % n, md.k[1] % n)
        amp = 0.5 * np.sqrt(2.0) / d.l
        cp = amp if md.kind == COS else -1j * amp
        cvec[i] = (cp * md.pol[0], cp * md.pol[1])
        ikvec[i] = (1j * scale * md.k[0], 1j * scale * md.k[1])
    return GalerkinTensors(basis, conv, idx, cvec, ikvec)


def stress_pairing(tensors: GalerkinTensors, Shat: np.ndarray, fhat: np.ndarray | None) -> np.ndarray:
    """D[i] = <S, grad xi_i> + <f, xi_i> from spectral data (Parseval, exact).

    Shat is the row-major spectral stress-like tensor entering the momentum
    weak form with a plus sign (i.e. 2A odot - W'(F) F^T); fhat the spectral
    body force (may be None).
    """
    d = tensors.basis.domain
    m = tensors.m
    D = np.empty(m)
    S = Shat.reshape(2, 2, d.n, d.n)
    for i in range(m):
        ii, jj = tensors.mode_index[i]
        acc = 0.0 + 0.0j
        for a in range(2):
            for b in range(2):
                # (grad xi_i)_{ab} at +k_i is ik_b * cvec_a
                acc += S[a, b, ii, jj] * np.conj(tensors.mode_ikvec[i, b] * tensors.mode_cvec[i, a])
            if fhat is not None:
                acc += fhat[a, ii, jj] * np.conj(tensors.mode_cvec[i, a])
        D[i] = 2.0 * d.area * np.real(acc)
    return D


def stress_forcing_raw(Fh: np.ndarray, Mh: np.ndarray, hext: ExternalField, t: float,
                       tensors: GalerkinTensors, params: ModelParams, pe: PadEval) -> np.ndarray:
    """Forcing vector D from raw spectral fields (hot path)."""
    S = 2.0 * params.a_exch * kernels.odot(pe.grad_grid(Mh)) \
        - kernels.ff_t(pe.grid(Fh), 2.0 * params.elastic.c_e)
    fhat = None
    if hext.preset == "spatial_gradient":
        G = hext.evaluate_grad(pe.domain, t)[:, :, 0, 0]
        fhat = np.stack([params.mu0 * np.einsum("k,kxy->xy", G[:, a], Mh) for a in range(2)])
    return stress_pairing(tensors, pe.spec(S), fhat)


def stress_forcing(F: SpectralField, M: SpectralField, hext: ExternalField, t: float,
                   tensors: GalerkinTensors, params: ModelParams, rule: str = "half") -> np.ndarray:
    """Forcing vector D of the velocity coefficient system."""
    return stress_forcing_raw(F.coeffs, M.coeffs, hext, t, tensors, params, PadEval(M.domain, rule))
