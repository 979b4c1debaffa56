"""Energy ledger, smallness budget, constraint monitors, running bound
monitors, and measured functional-inequality ratios.

The ledger tracks the exact semi-discrete identity

    d/dt [ kinetic + exchange + zeeman + elastic ]
        + nu int |grad v|^2  +  kappa a int |grad F|^2
        + int ( |H_eff|^2 - |M . H_eff|^2 )  +  mu0 int M . dtH_ext  = 0,

whose cumulative columns the integrator carries alongside the state.  The
balance residual reported per sample discretizes d/dt by centered differences
(second-order one-sided stencils at the ends) and adds the instantaneous
rates, with the external-work rate entering through the signed work column.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields

import numpy as np

from .bases import VelocityBasis
from .domain import Domain, Rank, SpectralField, component_gradients
from .integrators import SimState
from .operators import PadEval
from .params import ExternalField, ModelParams

LEDGER_COLUMNS = (
    "t", "kinetic", "exchange", "zeeman", "elastic", "total_energy",
    "diss_viscous_cum", "diss_regularization_cum", "diss_llg_cum",
    "work_external_cum", "balance_residual", "m_drift", "div_v_inf",
    "mean_v", "fp_iterations",
)


@dataclass
class EnergyLedger:
    """One per-sample row of the energy decomposition and its accumulators."""

    t: float
    kinetic: float
    exchange: float
    zeeman: float
    elastic: float
    total_energy: float
    diss_viscous_cum: float
    diss_regularization_cum: float
    diss_llg_cum: float
    work_external_cum: float
    balance_residual: float
    m_drift: float
    div_v_inf: float
    mean_v: float
    fp_iterations: int

    def as_tuple(self):
        return tuple(getattr(self, f.name) for f in dc_fields(self))


def dissipation_rates(g: np.ndarray, Fh: np.ndarray, Mh: np.ndarray, t: float,
                      basis: VelocityBasis, hext: ExternalField,
                      params: ModelParams, pe: PadEval) -> np.ndarray:
    """Instantaneous [viscous, regularization, llg, signed external work] rates."""
    d = basis.domain
    visc = params.nu * float(np.sum(basis.eigenvalues * g * g))
    reg = params.kappa * params.elastic.convexity * d.area * float(np.sum(d.k2 * np.abs(Fh) ** 2))
    Mg = pe.grid(Mh)
    Heff = 2.0 * params.a_exch * pe.lap_grid(Mh) + params.mu0 * hext.evaluate(d, t, pe.np_)
    mh = np.einsum("kxy,kxy->xy", Mg, Heff)
    llg = pe.quad(np.sum(Heff * Heff, axis=0) - mh * mh)
    work = 0.0
    if hext.preset == "uniform_sinusoidal_in_time":
        dH = hext.evaluate_dt(d, t, pe.np_)
        work = -params.mu0 * pe.quad(np.einsum("kxy,kxy->xy", Mg, dH))
    return np.array([visc, reg, llg, work])


def energy_components(state: SimState, hext: ExternalField, params: ModelParams,
                      rule: str = "half", fp_iterations: int = 0) -> EnergyLedger:
    """Spectral-quadrature evaluation of every ledger column at one sample."""
    d = state.domain
    kinetic = 0.5 * float(np.sum(state.g**2))
    exchange = params.a_exch * d.area * float(np.sum(d.k2 * np.abs(state.Mh) ** 2))
    elastic = params.elastic.c_e * d.area * float(np.sum(np.abs(state.Fh) ** 2))
    zeeman = 0.0
    if not hext.is_zero:
        pe = PadEval(d, rule)
        H = hext.evaluate(d, state.t, pe.np_)
        zeeman = -params.mu0 * pe.quad(np.einsum("kxy,kxy->xy", pe.grid(state.Mh), H))
    rep = constraint_report(state)
    return EnergyLedger(
        t=state.t, kinetic=kinetic, exchange=exchange, zeeman=zeeman, elastic=elastic,
        total_energy=kinetic + exchange + zeeman + elastic,
        diss_viscous_cum=float(state.acc[0]), diss_regularization_cum=float(state.acc[1]),
        diss_llg_cum=float(state.acc[2]), work_external_cum=float(state.acc[3]),
        balance_residual=np.nan, m_drift=rep["m_drift"], div_v_inf=rep["div_v_inf"],
        mean_v=rep["mean_v"], fp_iterations=fp_iterations,
    )


def constraint_report(state: SimState) -> dict:
    """max||M|-1|, sup-norm of div v, and the mean-velocity magnitude."""
    d = state.domain
    vh = state.basis.synthesize_coeffs(state.g)
    divv = d.backward((d.ikx * vh[0] + d.iky * vh[1])[None])[0]
    mean_v = float(np.hypot(np.abs(vh[0, 0, 0]), np.abs(vh[1, 0, 0])))
    return {
        "m_drift": state.m_drift(),
        "div_v_inf": float(np.abs(divv).max()),
        "mean_v": mean_v,
    }


# -- smallness budget ------------------------------------------------------------


@dataclass
class IEDReport:
    kinetic: float
    exchange: float
    elastic: float
    hext_sup_l1: float
    hext_dt_l1l1: float

    @property
    def total(self) -> float:
        return self.kinetic + self.exchange + self.elastic + 2.0 * self.hext_sup_l1 + self.hext_dt_l1l1


def ied(v0: SpectralField | None, F0: SpectralField, M0: SpectralField,
        hext: ExternalField, horizon: float, params: ModelParams) -> IEDReport:
    """Combined initial-energy-and-external-drive budget

        int 1/2 |v0|^2 + A |grad M0|^2 + W(F0) dx
            + 2 sup_t ||H_ext||_L1 + int_0^T ||dt H_ext||_L1 dt

    (the gradient term carries the exchange constant, which equals the
    conventional 1/2 at the default normalization)."""
    d = F0.domain
    kin = 0.5 * d.area * float(np.sum(np.abs(v0.coeffs) ** 2)) if v0 is not None else 0.0
    exch = params.a_exch * d.area * float(np.sum(d.k2 * np.abs(M0.coeffs) ** 2))
    ela = params.elastic.c_e * d.area * float(np.sum(np.abs(F0.coeffs) ** 2))
    return IEDReport(kin, exch, ela,
                     hext.sup_l1_norm(d, horizon), hext.dt_l1l1_norm(d, horizon))


# -- balance residual and bound monitors -------------------------------------------


def _ddt(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Centered differences, one-sided (third-order) stencils at the ends."""
    v, t = np.asarray(values, dtype=float), np.asarray(times, dtype=float)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (t[2:] - t[:-2])
    h0, h1 = t[1] - t[0], t[-1] - t[-2]
    if len(v) >= 4:
        out[0] = (-11.0 * v[0] + 18.0 * v[1] - 9.0 * v[2] + 2.0 * v[3]) / (6.0 * h0)
        out[-1] = (11.0 * v[-1] - 18.0 * v[-2] + 9.0 * v[-3] - 2.0 * v[-4]) / (6.0 * h1)
    else:
        out[0] = (v[1] - v[0]) / h0
        out[-1] = (v[-1] - v[-2]) / h1
    return out


def energy_balance_residual(rows: list[EnergyLedger], samples: list[SimState],
                            hext: ExternalField, params: ModelParams,
                            rule: str = "half") -> np.ndarray:
    """residual(t) = d/dt(total energy) + dissipation rates - work rate,
    evaluated per sample; zero for the exact semi-discrete dynamics."""
    if len(rows) < 3:
        return np.zeros(len(rows))
    times = np.array([r.t for r in rows])
    energy = np.array([r.total_energy for r in rows])
    pe = PadEval(samples[0].domain, rule)
    rates = np.stack([
        dissipation_rates(s.g, s.Fh, s.Mh, s.t, s.basis, hext, params, pe)
        for s in samples
    ])
    res = _ddt(energy, times) + rates[:, 0] + rates[:, 1] + rates[:, 2] - rates[:, 3]
    for r, value in zip(rows, res):
        r.balance_residual = float(value)
    return res


@dataclass
class BoundMonitorReport:
    times: np.ndarray
    lhs: np.ndarray                 # energy-plus-dissipation bound quantity per sample
    ied_total: float
    exceeded: bool
    lap_m_l2: np.ndarray            # ||lap M(t)||_L2 series
    lap_m_sq_cum: np.ndarray        # running int_0^t ||lap M||^2
    lady_constant: float            # measured Ladyzhenskaya ratio on the trajectory fields
    lady_times_ied: float


def bound_monitor(rows: list[EnergyLedger], samples: list[SimState],
                  ied_total: float, params: ModelParams, tol: float = 1e-6) -> BoundMonitorReport:
    """Running check that energy plus cumulative viscous/regularization
    dissipation stays below the initial budget, plus curvature norms of M and
    an informational measured-constant comparison."""
    times = np.array([r.t for r in rows])
    lhs = np.array([
        r.kinetic + r.exchange + r.elastic + r.diss_viscous_cum + r.diss_regularization_cum
        for r in rows
    ])
    d = samples[0].domain
    lap = np.array([
        np.sqrt(d.area * float(np.sum(d.k2**2 * np.abs(s.Mh) ** 2))) for s in samples
    ])
    cum = np.zeros_like(lap)
    for j in range(1, len(lap)):
        cum[j] = cum[j - 1] + 0.5 * (times[j] - times[j - 1]) * (lap[j] ** 2 + lap[j - 1] ** 2)
    lady = 0.0
    for s in (samples[0], samples[len(samples) // 2], samples[-1]):
        gm = SpectralField(d, Rank.VEC3, s.Mh)
        r = _lady_ratio_vec(gm)
        lady = max(lady, r)
    return BoundMonitorReport(times, lhs, ied_total, bool(np.any(lhs > ied_total + tol)),
                              lap, cum, lady, lady * ied_total)


def _lady_ratio_vec(f: SpectralField) -> float:
    d = f.domain
    pe = PadEval(d, "half")
    grid = np.stack([pe.grid(c[None])[0] for c in f.coeffs])
    l2 = np.sqrt(d.area * float(np.sum(np.abs(f.coeffs) ** 2)))
    if l2 == 0.0:
        return 0.0
    l4 = pe.quad(np.sum(grid**2, axis=0) ** 2) ** 0.25
    g2 = np.sqrt(d.area * float(np.sum(d.k2 * np.abs(f.coeffs) ** 2)))
    return l4 / (l2 + np.sqrt(g2) * np.sqrt(l2))


# -- functional inequality ratios ----------------------------------------------------


def _norms(domain: Domain, coeffs: np.ndarray, pe: PadEval) -> dict:
    """Spectral/quadrature norms of a vec3-like field used by the ratio set.

    The sup-norm is sampled on a fine fixed refinement (>= 256 points per
    axis) so that it measures the interpolant rather than the storage grid;
    grid-doubling then leaves it unchanged for resolved fields.
    """
    grid = pe.grid(coeffs)
    gradg = pe.grid(component_gradients(coeffs, domain))
    lap = -domain.k2 * coeffs
    lapg = pe.grid(lap)
    gradlap = pe.grid(component_gradients(lap, domain))
    area = domain.area

    n_inf = max(256, 2 * domain.n)
    grad_fine = domain.to_padded_grid(component_gradients(coeffs, domain), n_inf)
    gg2_fine = np.einsum("kaxy,kaxy->xy", grad_fine, grad_fine)

    g2 = np.sum(grid * grid, axis=0)
    gg2 = np.einsum("kaxy,kaxy->xy", gradg, gradg)
    ll2 = np.sum(lapg * lapg, axis=0)
    gl2 = np.einsum("kaxy,kaxy->xy", gradlap, gradlap)
    return {
        "f_l2": np.sqrt(area * float(np.sum(np.abs(coeffs) ** 2))),
        "f_l4": pe.quad(g2**2) ** 0.25,
        "grad_l2": np.sqrt(area * float(np.sum(domain.k2 * np.abs(coeffs) ** 2))),
        "grad_l4": pe.quad(gg2**2) ** 0.25,
        "grad_l6": pe.quad(gg2**3) ** (1.0 / 6.0),
        "grad_linf": float(np.sqrt(gg2_fine.max())),
        "lap_l2": np.sqrt(area * float(np.sum(domain.k2**2 * np.abs(coeffs) ** 2))),
        "lap_l4": pe.quad(ll2**2) ** 0.25,
        "gradlap_l2": float(np.sqrt(pe.quad(gl2))),
    }


#: name -> (lhs, rhs-with-unit-constant) built from the norm dictionary
INEQUALITIES = {
    "ladyzhenskaya": lambda n: (n["f_l4"], n["f_l2"] + np.sqrt(n["grad_l2"]) * np.sqrt(n["f_l2"])),
    "grad_l4_quartic": lambda n: (n["grad_l4"] ** 4,
                                  n["grad_l2"] ** 4 + n["lap_l2"] ** 2 * n["grad_l2"] ** 2),
    "w22_vs_lap": lambda n: (np.sqrt(n["f_l2"] ** 2 + n["grad_l2"] ** 2 + n["lap_l2"] ** 2),
                             np.sqrt(n["f_l2"] ** 2 + n["lap_l2"] ** 2)),
    "grad_l4_interp": lambda n: (n["grad_l4"],
                                 np.sqrt(n["grad_l2"]) * (n["grad_l2"] ** 2 + n["lap_l2"] ** 2) ** 0.25),
    "grad_l6_interp": lambda n: (n["grad_l6"],
                                 n["grad_l2"] ** (1.0 / 3.0) * (n["grad_l2"] ** 2 + n["lap_l2"] ** 2) ** (1.0 / 3.0)),
    "agmon_grad_linf": lambda n: (n["grad_linf"],
                                  np.sqrt(n["grad_l2"])
                                  * (n["grad_l2"] ** 2 + n["lap_l2"] ** 2 + n["gradlap_l2"] ** 2) ** 0.25),
    "lap_l4_interp": lambda n: (n["lap_l4"],
                                np.sqrt(n["lap_l2"]) * (n["lap_l2"] ** 2 + n["gradlap_l2"] ** 2) ** 0.25),
}


def inequality_ratios(fields: list[SpectralField], rule: str = "half") -> dict[str, float]:
    """Max measured LHS/RHS ratio (unit constants) over the supplied fields;
    fields with a vanishing right-hand side are skipped."""
    out = {name: 0.0 for name in INEQUALITIES}
    for f in fields:
        pe = PadEval(f.domain, rule)
        n = _norms(f.domain, f.coeffs, pe)
        for name, fn in INEQUALITIES.items():
            lhs, rhs = fn(n)
            if rhs > 0.0:
                out[name] = max(out[name], lhs / rhs)
    return out


def inequality_ratios_single(f: SpectralField, rule: str = "half") -> dict[str, float]:
    return inequality_ratios([f], rule)
