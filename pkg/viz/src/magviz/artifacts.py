"""Readers for the simulator's on-disk artifacts.

This package never recomputes physics: everything plotted comes from the run
directory's energy CSV and binary snapshots, parsed here against their
documented schemas.  Any schema violation raises SchemaError naming the
offending piece.

Snapshot layout: magic b"MES1", uint32 header length, JSON header
{"n", "l", "t", "endian": "little", "fields": ["v:2", "F:4", "M:3"]},
then n^2 * 9 little-endian float64 grid values (v_x, v_y, F11, F12, F21,
F22, M1, M2, M3), row-major per component.
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"MES1"
FIELD_LIST = ["v:2", "F:4", "M:3"]
NCOMP = 9

ENERGY_COLUMNS = (
    "t", "kinetic", "exchange", "zeeman", "elastic", "total_energy",
    "diss_viscous_cum", "diss_regularization_cum", "diss_llg_cum",
    "work_external_cum", "balance_residual", "m_drift", "div_v_inf",
    "mean_v", "fp_iterations",
)

CONVERGENCE_COLUMNS = ("dt", "error")


class SchemaError(ValueError):
    """An artifact does not match its documented schema."""


@dataclass
class Snapshot:
    t: float
    l: float
    v: np.ndarray    # (2, n, n)
    F: np.ndarray    # (4, n, n)
    M: np.ndarray    # (3, n, n)

    @property
    def n(self) -> int:
        return self.v.shape[-1]


def read_snapshot(path: str | Path) -> Snapshot:
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < 8 or blob[:4] != MAGIC:
        raise SchemaError(f"{path}: bad magic, not a snapshot file")
    (hlen,) = struct.unpack("<I", blob[4:8])
    if len(blob) < 8 + hlen:
        raise SchemaError(f"{path}: truncated header")
    try:
        header = json.loads(blob[8:8 + hlen].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise SchemaError(f"{path}: corrupt header: {err}") from None
    missing = [k for k in ("n", "l", "t", "endian", "fields") if k not in header]
    if missing:
        raise SchemaError(f"{path}: header missing {missing}")
    if header["endian"] != "little" or header["fields"] != FIELD_LIST:
        raise SchemaError(f"{path}: unsupported layout")
    n = int(header["n"])
    body = blob[8 + hlen:]
    if len(body) != n * n * NCOMP * 8:
        raise SchemaError(f"{path}: payload is {len(body)} bytes, expected {n * n * NCOMP * 8}")
    grids = np.frombuffer(body, dtype="<f8").reshape(NCOMP, n, n)
    return Snapshot(float(header["t"]), float(header["l"]),
                    grids[0:2].copy(), grids[2:6].copy(), grids[6:9].copy())


def read_energy_csv(path: str | Path) -> dict[str, np.ndarray]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty CSV") from None
        missing = [c for c in ENERGY_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        extra = [c for c in header if c not in ENERGY_COLUMNS]
        if extra:
            raise SchemaError(f"{path}: unknown column(s) {', '.join(extra)}")
        rows = [[float(v) for v in row] for row in reader if row]
    arr = np.array(rows) if rows else np.empty((0, len(header)))
    return {name: arr[:, header.index(name)] for name in ENERGY_COLUMNS}


def read_convergence_csv(path: str | Path) -> dict[str, np.ndarray]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty CSV") from None
        missing = [c for c in CONVERGENCE_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        rows = [[float(v) for v in row] for row in reader if row]
    if len(rows) < 2:
        raise SchemaError(f"{path}: need at least two (dt, error) rows")
    arr = np.array(rows)
    return {name: arr[:, header.index(name)] for name in CONVERGENCE_COLUMNS}


@dataclass
class RunArtifacts:
    """A run directory: parsed energy table plus the snapshot file list."""

    rundir: Path
    energy: dict[str, np.ndarray]
    snapshots: list[Path]

    @classmethod
    def load(cls, rundir: str | Path) -> "RunArtifacts":
        rundir = Path(rundir)
        if not rundir.is_dir():
            raise SchemaError(f"not a run directory: {rundir}")
        csv_path = rundir / "energy.csv"
        if not csv_path.is_file():
            raise SchemaError(f"{rundir}: energy.csv not found")
        energy = read_energy_csv(csv_path)
        snapshots = sorted(rundir.glob("snapshot_*.mes"))
        return cls(rundir, energy, snapshots)
