"""Command-line surface.

    magnetoelastic simulate <config>          run and write artifacts
    magnetoelastic diagnose <rundir>          recheck a run directory
    magnetoelastic verify-weakform <rundir>   weak-form residual certificate
    magnetoelastic convergence --case <name>  observed-order study
    magnetoelastic ied <config>               smallness budget report

Exit codes: 0 pass, 1 fail, 2 usage error.  Every command prints one
machine-readable summary line prefixed with the command name.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, initial, weakform
from .bases import VelocityBasis
from .config import RunConfig, parse_config, write_effective_config
from .coupler import FixedPointConfig, run
from .domain import ConfigurationError, Domain
from .integrators import DivergedError
from .operators import assemble_convection_tensor
from .snapshots import (SnapshotError, read_energy_csv, read_snapshot,
                        write_energy_csv, write_snapshot)

PASS, FAIL, USAGE = 0, 1, 2
CONVERGENCE_CASES = ("taylor_green", "heat_F", "precession", "m_drift")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return USAGE if err.code not in (0, None) else 0
    if args.command is None:
        parser.print_usage()
        return USAGE
    try:
        return args.func(args)
    except (ConfigurationError, SnapshotError) as err:
        print(f"{args.command}: error: {err}", file=sys.stderr)
        return USAGE if isinstance(err, ConfigurationError) else FAIL
    except DivergedError as err:
        print(f"{args.command}: diverged: {err}", file=sys.stderr)
        return FAIL


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="magnetoelastic", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command")

    sim = sub.add_parser("simulate", help="run a configuration and write artifacts")
    sim.add_argument("config")
    sim.set_defaults(func=cmd_simulate)

    dia = sub.add_parser("diagnose", help="recheck the artifacts of a run directory")
    dia.add_argument("rundir")
    dia.set_defaults(func=cmd_diagnose)

    ver = sub.add_parser("verify-weakform", help="weak-form residual certificate for a run directory")
    ver.add_argument("rundir")
    ver.add_argument("--threshold", type=float, default=1e-5)
    ver.add_argument("--tests", type=int, default=20)
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify_weakform)

    conv = sub.add_parser("convergence", help="observed-order study against an analytic oracle")
    conv.add_argument("--case", required=True, choices=CONVERGENCE_CASES)
    conv.add_argument("--out", default=None, help="directory for a dt,error CSV of the study")
    conv.set_defaults(func=cmd_convergence)

    ied_p = sub.add_parser("ied", help="initial-energy-and-drive smallness budget")
    ied_p.add_argument("config")
    ied_p.set_defaults(func=cmd_ied)
    return p


def _setup(cfg: RunConfig):
    domain = Domain(cfg.n, cfg.l)
    basis = VelocityBasis(domain, cfg.m_velocity_modes)
    tensors = assemble_convection_tensor(basis)
    params = cfg.model_params()
    hext = cfg.external_field()
    state = initial.build_initial_state(cfg, domain, basis)
    return domain, basis, tensors, params, hext, state


# -- simulate ---------------------------------------------------------------------


def cmd_simulate(args) -> int:
    cfg = parse_config(args.config)
    domain, basis, tensors, params, hext, state = _setup(cfg)
    outdir = Path(cfg.directory)
    outdir.mkdir(parents=True, exist_ok=True)
    write_effective_config(cfg, outdir)

    fp_cfg = FixedPointConfig(tau=cfg.tau, eps_fp=cfg.fp_tol, max_iter=cfg.fp_max_iter,
                              mode=cfg.mode)
    result = run(state, cfg.T, cfg.dt, fp_cfg, hext, tensors, params,
                 rule=cfg.dealias_rule, renormalize=cfg.renormalize_M,
                 output_stride=cfg.output_stride)

    rows = [diagnostics.energy_components(s, hext, params, cfg.dealias_rule, int(it))
            for s, it in zip(result.samples, result.fp_iterations)]
    diagnostics.energy_balance_residual(rows, result.samples, hext, params, cfg.dealias_rule)
    write_energy_csv(outdir / "energy.csv", rows)
    for s in result.samples:
        write_snapshot(outdir / f"snapshot_{s.t:012.6f}.mes", s)
    summary = {
        "status": result.status,
        "t_final": result.t_final,
        "samples": len(result.samples),
        "max_m_drift": max(r.m_drift for r in rows),
        "max_divv": max(r.div_v_inf for r in rows),
        "failure": result.failure,
    }
    (outdir / "run_summary.json").write_text(json.dumps(summary, indent=2))
    if result.fp_log:
        (outdir / "fp_iterations.json").write_text(json.dumps(result.fp_log, indent=2))
    print(f"simulate: status={result.status} t_final={result.t_final:.6g} "
          f"samples={len(result.samples)} outdir={outdir}")
    return PASS if result.ok else FAIL


def _load_rundir(rundir: str):
    outdir = Path(rundir)
    cfg = parse_config(outdir / "effective.cfg")
    domain = Domain(cfg.n, cfg.l)
    basis = VelocityBasis(domain, cfg.m_velocity_modes)
    snaps = sorted(outdir.glob("snapshot_*.mes"))
    if not snaps:
        raise SnapshotError(f"{outdir}: no snapshots found")
    samples = [read_snapshot(s, domain, basis) for s in snaps]
    return cfg, domain, basis, samples, outdir


def cmd_diagnose(args) -> int:
    cfg, domain, basis, samples, outdir = _load_rundir(args.rundir)
    params, hext = cfg.model_params(), cfg.external_field()
    csv_data = read_energy_csv(outdir / "energy.csv")
    rows = [diagnostics.energy_components(s, hext, params, cfg.dealias_rule) for s in samples]
    resid = diagnostics.energy_balance_residual(rows, samples, hext, params, cfg.dealias_rule)
    v0 = samples[0].velocity()
    budget = diagnostics.ied(v0, samples[0].f_field(), samples[0].m_field(), hext, cfg.T, params)
    monitor = diagnostics.bound_monitor(rows, samples, budget.total, params)
    recomputed_energy = np.array([r.total_energy for r in rows])
    csv_energy = csv_data["total_energy"][: len(recomputed_energy)]
    csv_consistent = bool(np.allclose(recomputed_energy, csv_energy, rtol=1e-10, atol=1e-12))
    ok = csv_consistent and not monitor.exceeded
    print(f"diagnose: ied={budget.total:.6g} max_residual={np.abs(resid).max():.3e} "
          f"bound_exceeded={monitor.exceeded} csv_consistent={csv_consistent} "
          f"max_m_drift={max(r.m_drift for r in rows):.3e}")
    return PASS if ok else FAIL


def cmd_verify_weakform(args) -> int:
    cfg, domain, basis, samples, outdir = _load_rundir(args.rundir)
    params, hext = cfg.model_params(), cfg.external_field()
    report = weakform.certificate(samples, hext, params, threshold=args.threshold,
                                  n_tests=args.tests, seed=args.seed, rule=cfg.dealias_rule)
    lines = ["form,test,normalized_residual"]
    for form, vals in report["residuals"].items():
        for j, v in enumerate(vals):
            lines.append(f"{form},{j},{v!r}")
    (outdir / "weakform_certificate.csv").write_text("\n".join(lines) + "\n")
    (outdir / "weakform_certificate.txt").write_text(
        f"threshold {report['threshold']!r}\nseed {report['seed']}\n"
        + "".join(f"{form}: worst {report['worst'][form]!r}\n" for form in report["worst"])
        + ("PASS\n" if report["pass"] else "FAIL\n"))
    worst = max(report["worst"].values())
    print(f"verify-weakform: worst={worst:.3e} threshold={args.threshold:.1e} "
          f"pass={report['pass']}")
    return PASS if report["pass"] else FAIL


def cmd_ied(args) -> int:
    cfg = parse_config(args.config)
    domain, basis, tensors, params, hext, state = _setup(cfg)
    budget = diagnostics.ied(state.velocity(), state.f_field(), state.m_field(),
                             hext, cfg.T, params)
    print(f"ied: total={budget.total:.8g} kinetic={budget.kinetic:.6g} "
          f"exchange={budget.exchange:.6g} elastic={budget.elastic:.6g} "
          f"hext_sup_l1={budget.hext_sup_l1:.6g} hext_dt_l1l1={budget.hext_dt_l1l1:.6g}")
    return PASS


# -- convergence study ------------------------------------------------------------


def _observed_order(errors: list[float], factor: float = 2.0) -> float:
    e = np.asarray(errors, dtype=float)
    return float(np.mean(np.log(e[:-1] / e[1:]) / np.log(factor)))


def cmd_convergence(args) -> int:
    from . import convergence as conv

    case = {
        "taylor_green": conv.taylor_green_case,
        "heat_F": conv.heat_f_case,
        "precession": conv.precession_case,
        "m_drift": conv.m_drift_case,
    }[args.case]
    dts, errors, lo, hi = case()
    order = _observed_order(errors)
    ok = lo <= order <= hi
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        lines = ["dt,error"] + [f"{dt!r},{e!r}" for dt, e in zip(dts, errors)]
        (out / f"convergence_{args.case}.csv").write_text("\n".join(lines) + "\n")
    pairs = " ".join(f"{dt:g}:{e:.3e}" for dt, e in zip(dts, errors))
    print(f"convergence: case={args.case} observed_order={order:.2f} "
          f"band=[{lo:.2f},{hi:.2f}] pass={ok} errors {pairs}")
    return PASS if ok else FAIL


if __name__ == "__main__":
    sys.exit(main())
