"""Independent certificate that a sampled trajectory approximately satisfies
the time-integrated weak formulations against separable test functions
phi(x, t) = phi1(t) phi2(x) with piecewise-linear phi1, phi1(T) = 0.

Space integrals are spectral (padded quadrature for the nonlinear pieces);
the time integral uses the trapezoid rule, except that the d/dt phi1 pairing
integrates the exact piecewise-constant derivative of phi1 against the
trapezoid interpolant of its factor.  Signed residuals are exposed so that
affinity in the test function can be asserted; the batch certificate reports
absolute residuals normalized by test-function size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .domain import (ConfigurationError, Domain, Rank, SpectralField,
                     component_gradients, leray_project)
from .fields import random_field
from .integrators import SimState
from .operators import PadEval
from .params import ExternalField, ModelParams, UnsupportedParameters

PROFILES = ("ramp", "hat", "step")
FORMS = ("momentum", "F", "M")


@dataclass
class TestFunction:
    """Separable space-time test function; the trajectory is assumed to start
    at t = 0 and the temporal part vanishes at t = horizon."""

    __test__ = False  # not a pytest test class despite the domain name

    profile: str
    spatial: SpectralField
    horizon: float

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ConfigurationError(f"unknown temporal profile {self.profile!r}")
        if not self.horizon > 0:
            raise ConfigurationError("test-function horizon must be positive")

    def breakpoints(self) -> list[tuple[float, float]]:
        """(time, value) nodes of the piecewise-linear temporal part."""
        T = self.horizon
        if self.profile == "ramp":
            return [(0.0, 1.0), (T, 0.0)]
        if self.profile == "hat":
            return [(0.0, 0.0), (0.5 * T, 1.0), (T, 0.0)]
        return [(0.0, 1.0), (0.7 * T, 1.0), (T, 0.0)]

    def phi1(self, times: np.ndarray) -> np.ndarray:
        pts = self.breakpoints()
        return np.interp(times, [p[0] for p in pts], [p[1] for p in pts])

    def spatial_norm(self) -> float:
        d = self.spatial.domain
        c = self.spatial.coeffs
        l2 = np.sqrt(d.area * float(np.sum(np.abs(c) ** 2)))
        h1 = np.sqrt(d.area * float(np.sum(d.k2 * np.abs(c) ** 2)))
        return l2 + h1


def make_battery(domain: Domain, horizon: float, n_tests: int = 20, seed: int = 0,
                 band: int = 4, basis=None) -> dict[str, list[TestFunction]]:
    """Seeded battery per weak form: randomized band-limited spatial parts
    cycling through the three temporal profiles, L^2-normalized.

    Momentum spatial parts are divergence-free; when the velocity mode basis
    is supplied they are random combinations of its modes, which is the space
    the discretized momentum balance is tested against (out-of-span parts
    would add a resolution-limit floor to the residual instead).
    """
    out: dict[str, list[TestFunction]] = {form: [] for form in FORMS}
    for i in range(n_tests):
        profile = PROFILES[i % len(PROFILES)]
        base_seed = seed * 10000 + i
        if basis is not None:
            rng = np.random.default_rng(base_seed + 1)
            phi = SpectralField(domain, Rank.VEC2,
                                basis.synthesize_coeffs(rng.standard_normal(basis.m)))
        else:
            phi = leray_project(random_field(domain, Rank.VEC2, band, 1.0, base_seed + 1))
        out["momentum"].append(TestFunction(profile, _l2_normalize(phi), horizon))
        xi = random_field(domain, Rank.TENSOR2, band, 1.0, base_seed + 2)
        out["F"].append(TestFunction(profile, _l2_normalize(xi), horizon))
        zeta = random_field(domain, Rank.VEC3, band, 1.0, base_seed + 3)
        out["M"].append(TestFunction(profile, _l2_normalize(zeta), horizon))
    return out


def _l2_normalize(f: SpectralField) -> SpectralField:
    norm = np.sqrt(f.domain.area * float(np.sum(np.abs(f.coeffs) ** 2)))
    if norm > 0:
        f.coeffs /= norm
    return f


def _pair(domain: Domain, ahat: np.ndarray, bhat: np.ndarray) -> float:
    return float(np.real(np.sum(ahat * np.conj(bhat))) * domain.area)


def _integral_between(P: np.ndarray, ts: np.ndarray, a: float, b: float) -> float:
    """Trapezoid integral of the piecewise-linear interpolant of (ts, P) over
    [a, b]; exact on partial sub-intervals (profile breakpoints need not land
    on the sample grid)."""
    if b <= a:
        return 0.0
    inner = (ts > a) & (ts < b)
    nodes = np.concatenate([[a], ts[inner], [b]])
    vals = np.concatenate([[np.interp(a, ts, P)], P[inner], [np.interp(b, ts, P)]])
    return float(np.trapezoid(vals, nodes))


class WeakFormEvaluator:
    """Streams once over the trajectory samples, contracting the per-sample
    spectral integrand factors against every requested test function."""

    def __init__(self, samples: list[SimState], hext: ExternalField, params: ModelParams,
                 rule: str = "half"):
        if len(samples) < 3:
            raise ConfigurationError("weak-form quadrature needs at least three samples")
        if abs(samples[0].t) > 1e-12:
            raise ConfigurationError("weak forms are stated for trajectories starting at t = 0")
        if not params.normalized_llg:
            raise UnsupportedParameters("weak forms are stated in the normalized parameter set")
        self.samples = samples
        self.times = np.array([s.t for s in samples])
        self.hext = hext
        self.params = params
        self.domain = samples[0].domain
        self.basis = samples[0].basis
        self.rule = rule
        self._series_cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}

    # -- per-sample spectral factors, computed for the forms requested --------

    def _sample_factors(self, s: SimState, forms: set, pe: PadEval) -> dict:
        p, d = self.params, self.domain
        vhat = self.basis.synthesize_coeffs(s.g)
        v = pe.grid(vhat)
        gradv = pe.grad_grid(vhat)
        fac: dict = {}
        if "momentum" in forms:
            conv_hat = pe.spec(kernels.advect(v, gradv))
            gradM = pe.grad_grid(s.Mh)
            S = 2.0 * p.a_exch * kernels.odot(gradM) - kernels.ff_t(pe.grid(s.Fh), 2.0 * p.elastic.c_e)
            S_hat = pe.spec(S) - p.nu * component_gradients(vhat, d).reshape(4, d.n, d.n)
            fhat = None
            if self.hext.preset == "spatial_gradient":
                G = self.hext.evaluate_grad(d, s.t)[:, :, 0, 0]
                fhat = np.stack([p.mu0 * np.einsum("k,kxy->xy", G[:, a], s.Mh) for a in range(2)])
            fac["momentum"] = (vhat, conv_hat, S_hat, fhat)
        if "F" in forms:
            FQ_hat = pe.spec(kernels.advect(v, pe.grad_grid(s.Fh))
                             - kernels.gradv_f(gradv.reshape(2, 2, pe.np_, pe.np_), pe.grid(s.Fh)))
            fac["F"] = (s.Fh, FQ_hat)
        if "M" in forms:
            Mg = pe.grid(s.Mh)
            gradM = pe.grad_grid(s.Mh)
            lapM = pe.lap_grid(s.Mh)
            H = self.hext.evaluate(d, s.t, pe.np_)
            g2 = np.einsum("kaxy,kaxy->xy", gradM, gradM)
            mdh = np.einsum("kxy,kxy->xy", Mg, H)
            m_pt = (kernels.advect(v, gradM) + kernels.cross3(Mg, lapM + H)
                    - g2 * Mg + mdh * Mg - H)
            MQ_hat = pe.spec(m_pt) + d.k2 * s.Mh
            fac["M"] = (s.Mh, MQ_hat)
        return fac

    def _contract(self, form: str, fac: dict, phi: np.ndarray, gradphi) -> tuple[float, float]:
        d = self.domain
        if form == "momentum":
            vhat, conv_hat, S_hat, fhat = fac["momentum"]
            P = _pair(d, vhat, phi)
            Q = _pair(d, conv_hat, phi) - _pair(d, S_hat, gradphi)
            if fhat is not None:
                Q -= _pair(d, fhat, phi)
            return P, Q
        if form == "F":
            Fh, FQ_hat = fac["F"]
            P = _pair(d, Fh, phi)
            Q = _pair(d, FQ_hat, phi) + self.params.kappa * _pair(d, d.k2 * Fh, phi)
            return P, Q
        Mh, MQ_hat = fac["M"]
        return _pair(d, Mh, phi), _pair(d, MQ_hat, phi)

    def build_series(self, requests: list[tuple[str, TestFunction]]) -> list[tuple[np.ndarray, np.ndarray]]:
        """P(t_j), Q(t_j) series for every (form, test) request in one sweep."""
        keys = [(form, tf.spatial.coeffs.tobytes()) for form, tf in requests]
        missing = [j for j, k in enumerate(keys) if k not in self._series_cache]
        if missing:
            pe = PadEval(self.domain, self.rule)
            forms = {requests[j][0] for j in missing}
            grads = {}
            for j in missing:
                form, tf = requests[j]
                if form == "momentum":
                    grads[j] = component_gradients(tf.spatial.coeffs, self.domain).reshape(
                        4, self.domain.n, self.domain.n)
            acc = {j: (np.empty(len(self.samples)), np.empty(len(self.samples))) for j in missing}
            for i, s in enumerate(self.samples):
                fac = self._sample_factors(s, forms, pe)
                for j in missing:
                    form, tf = requests[j]
                    P, Q = self._contract(form, fac, tf.spatial.coeffs, grads.get(j))
                    acc[j][0][i] = P
                    acc[j][1][i] = Q
            for j in missing:
                self._series_cache[keys[j]] = acc[j]
        return [self._series_cache[k] for k in keys]

    # -- quadrature -----------------------------------------------------------

    def signed_residual(self, form: str, tf: TestFunction) -> float:
        (series,) = self.build_series([(form, tf)])
        return self._quadrature(series, tf)

    def _quadrature(self, series: tuple[np.ndarray, np.ndarray], tf: TestFunction) -> float:
        P, Q = series
        ts = self.times
        breaks = [b for b, _ in tf.breakpoints()]
        # trapezoid nodes: sample times plus profile breakpoints, so the kinks
        # of phi1 never straddle a quadrature cell
        nodes = np.unique(np.concatenate([ts, [b for b in breaks if ts[0] < b < ts[-1]]]))
        term_q = float(np.trapezoid(tf.phi1(nodes) * np.interp(nodes, ts, Q), nodes))
        term_dt = 0.0
        for (t0, v0), (t1, v1) in zip(tf.breakpoints()[:-1], tf.breakpoints()[1:]):
            slope = (v1 - v0) / (t1 - t0)
            if slope != 0.0:
                term_dt += slope * _integral_between(P, ts, max(t0, ts[0]), min(t1, ts[-1]))
        return -term_dt + term_q - tf.phi1(ts[:1])[0] * P[0]

    def residual(self, form: str, tf: TestFunction) -> float:
        return abs(self.signed_residual(form, tf))

    def normalized_residual(self, form: str, tf: TestFunction) -> float:
        return self.residual(form, tf) / max(tf.spatial_norm(), 1e-300)

    def battery_report(self, battery: dict[str, list[TestFunction]]) -> dict[str, np.ndarray]:
        requests = [(form, tf) for form in FORMS for tf in battery.get(form, [])]
        self.build_series(requests)
        return {
            form: np.array([self.normalized_residual(form, tf) for tf in tests])
            for form, tests in battery.items()
        }


# -- public single-test entry points ------------------------------------------


def residual_momentum(samples: list[SimState], tf: TestFunction, hext: ExternalField,
                      params: ModelParams, rule: str = "half") -> float:
    if tf.spatial.rank is not Rank.VEC2:
        raise ConfigurationError("momentum tests need a vec2 divergence-free spatial part")
    return WeakFormEvaluator(samples, hext, params, rule).residual("momentum", tf)


def residual_F(samples: list[SimState], tf: TestFunction, params: ModelParams,
               rule: str = "half") -> float:
    if tf.spatial.rank is not Rank.TENSOR2:
        raise ConfigurationError("deformation-gradient tests need a tensor2x2 spatial part")
    return WeakFormEvaluator(samples, ExternalField("zero"), params, rule).residual("F", tf)


def residual_M(samples: list[SimState], tf: TestFunction, hext: ExternalField,
               params: ModelParams, rule: str = "half") -> float:
    if tf.spatial.rank is not Rank.VEC3:
        raise ConfigurationError("magnetization tests need a vec3 spatial part")
    return WeakFormEvaluator(samples, hext, params, rule).residual("M", tf)


def certificate(samples: list[SimState], hext: ExternalField, params: ModelParams,
                threshold: float = 1e-5, n_tests: int = 20, seed: int = 0,
                rule: str = "half") -> dict:
    """PASS/FAIL batch certificate over the seeded battery."""
    battery = make_battery(samples[0].domain, samples[-1].t, n_tests, seed,
                           basis=samples[0].basis)
    ev = WeakFormEvaluator(samples, hext, params, rule)
    report = ev.battery_report(battery)
    worst = {form: float(vals.max()) for form, vals in report.items()}
    return {
        "horizon": samples[-1].t - samples[0].t,
        "seed": seed,
        "threshold": threshold,
        "n_tests": n_tests,
        "residuals": report,
        "worst": worst,
        "pass": all(v <= threshold for v in worst.values()),
    }
