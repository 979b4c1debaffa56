"""Figure builders.  Deterministic output names, regenerated idempotently."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .artifacts import RunArtifacts, read_convergence_csv, read_snapshot


def plot_energy(rundir: str | Path, outdir: str | Path | None = None) -> list[Path]:
    """Stacked energy components, cumulative dissipation/work, and the
    balance-residual subplot; one figure file."""
    arts = RunArtifacts.load(rundir)
    outdir = Path(outdir or arts.rundir / "figures")
    outdir.mkdir(parents=True, exist_ok=True)
    e = arts.energy
    t = e["t"]

    fig, axes = plt.subplots(3, 1, figsize=(7, 9), sharex=True)
    ax = axes[0]
    ax.stackplot(t, e["kinetic"], e["exchange"], e["elastic"],
                 labels=["kinetic", "exchange", "elastic"], alpha=0.8)
    ax.plot(t, e["total_energy"], "k-", lw=1.2, label="total (incl. zeeman)")
    ax.set_ylabel("energy")
    ax.legend(loc="upper right", fontsize=8)

    ax = axes[1]
    ax.plot(t, e["diss_viscous_cum"], label="viscous")
    ax.plot(t, e["diss_regularization_cum"], label="regularization")
    ax.plot(t, e["diss_llg_cum"], label="magnetic relaxation")
    ax.plot(t, e["work_external_cum"], label="external work")
    ax.set_ylabel("cumulative")
    ax.legend(loc="upper left", fontsize=8)

    ax = axes[2]
    resid = np.abs(e["balance_residual"])
    finite = np.isfinite(resid)
    if finite.any() and (resid[finite] > 0).any():
        ax.semilogy(t[finite], np.maximum(resid[finite], 1e-300))
    else:
        ax.plot(t, np.zeros_like(t))
    ax.set_ylabel("|balance residual|")
    ax.set_xlabel("t")

    fig.tight_layout()
    out = outdir / "energy.png"
    fig.savefig(out, dpi=130)
    plt.close(fig)
    return [out]


def plot_drift(rundir: str | Path, outdir: str | Path | None = None) -> list[Path]:
    """Constraint-drift curves: unit-norm drift and divergence norm."""
    arts = RunArtifacts.load(rundir)
    outdir = Path(outdir or arts.rundir / "figures")
    outdir.mkdir(parents=True, exist_ok=True)
    e = arts.energy
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(e["t"], np.maximum(e["m_drift"], 1e-300), label="max | |M|-1 |")
    ax.semilogy(e["t"], np.maximum(e["div_v_inf"], 1e-300), label="||div v||_inf")
    ax.semilogy(e["t"], np.maximum(e["mean_v"], 1e-300), label="|mean v|")
    ax.set_xlabel("t")
    ax.legend(fontsize=8)
    fig.tight_layout()
    out = outdir / "constraint_drift.png"
    fig.savefig(out, dpi=130)
    plt.close(fig)
    return [out]


def plot_fields(snapshot_path: str | Path, outdir: str | Path | None = None) -> list[Path]:
    """Velocity quiver, |M| heatmap, in-plane M direction map, |F| heatmap."""
    snapshot_path = Path(snapshot_path)
    snap = read_snapshot(snapshot_path)
    outdir = Path(outdir or snapshot_path.parent / "figures")
    outdir.mkdir(parents=True, exist_ok=True)
    stem = snapshot_path.stem
    made = []

    n, l = snap.n, snap.l
    x = np.arange(n) * (l / n)
    X, Y = np.meshgrid(x, x, indexing="ij")

    fig, ax = plt.subplots(figsize=(5, 5))
    stride = max(1, n // 16)
    ax.quiver(X[::stride, ::stride], Y[::stride, ::stride],
              snap.v[0, ::stride, ::stride], snap.v[1, ::stride, ::stride])
    ax.set_title(f"velocity, t={snap.t:.4g}")
    ax.set_aspect("equal")
    out = outdir / f"{stem}_velocity.png"
    fig.savefig(out, dpi=130)
    plt.close(fig)
    made.append(out)

    mag = np.sqrt(np.sum(snap.M**2, axis=0))
    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.imshow(mag.T, origin="lower", extent=(0, l, 0, l))
    fig.colorbar(im, ax=ax)
    ax.set_title(f"|M|, t={snap.t:.4g}")
    out = outdir / f"{stem}_m_norm.png"
    fig.savefig(out, dpi=130)
    plt.close(fig)
    made.append(out)

    angle = np.arctan2(snap.M[1], snap.M[0])
    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.imshow(angle.T, origin="lower", extent=(0, l, 0, l), cmap="hsv",
                   vmin=-np.pi, vmax=np.pi)
    fig.colorbar(im, ax=ax)
    ax.set_title(f"in-plane M direction, t={snap.t:.4g}")
    out = outdir / f"{stem}_m_direction.png"
    fig.savefig(out, dpi=130)
    plt.close(fig)
    made.append(out)

    fnorm = np.sqrt(np.sum(snap.F**2, axis=0))
    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.imshow(fnorm.T, origin="lower", extent=(0, l, 0, l))
    fig.colorbar(im, ax=ax)
    ax.set_title(f"|F|, t={snap.t:.4g}")
    out = outdir / f"{stem}_f_norm.png"
    fig.savefig(out, dpi=130)
    plt.close(fig)
    made.append(out)
    return made


def fit_order(dts: np.ndarray, errors: np.ndarray) -> float:
    """Least-squares slope of log(error) against log(dt)."""
    return float(np.polyfit(np.log(dts), np.log(errors), 1)[0])


def plot_convergence(csv_path: str | Path, outdir: str | Path | None = None) -> list[Path]:
    csv_path = Path(csv_path)
    data = read_convergence_csv(csv_path)
    outdir = Path(outdir or csv_path.parent / "figures")
    outdir.mkdir(parents=True, exist_ok=True)
    order = fit_order(data["dt"], data["error"])
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(data["dt"], data["error"], "o-")
    ref = data["error"][0] * (data["dt"] / data["dt"][0]) ** round(order)
    ax.loglog(data["dt"], ref, "k--", lw=0.8, label=f"slope {round(order)}")
    ax.annotate(f"fitted order {order:.2f}", xy=(0.05, 0.9), xycoords="axes fraction")
    ax.set_xlabel("dt")
    ax.set_ylabel("error")
    ax.legend(fontsize=8)
    fig.tight_layout()
    out = outdir / (csv_path.stem + ".png")
    fig.savefig(out, dpi=130)
    plt.close(fig)
    return [out]


def plot_all(rundir: str | Path, outdir: str | Path | None = None) -> list[Path]:
    """Full figure set for a run directory."""
    arts = RunArtifacts.load(rundir)
    outdir = Path(outdir or arts.rundir / "figures")
    made = plot_energy(rundir, outdir)
    made += plot_drift(rundir, outdir)
    for snap in arts.snapshots:
        made += plot_fields(snap, outdir)
    for conv in sorted(arts.rundir.glob("convergence_*.csv")):
        made += plot_convergence(conv, outdir)
    return made
