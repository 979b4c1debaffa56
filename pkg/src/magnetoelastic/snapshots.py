"""Binary field snapshots and the energy-ledger CSV.

Snapshot layout (little-endian, explicit tag):

    magic   4 bytes   b"MES1"
    header  JSON, utf-8, length-prefixed by a uint32:
            {"n": int, "l": float, "t": float, "endian": "little",
             "fields": ["v:2", "F:4", "M:3"]}
    payload n^2 * 9 float64 values, row-major per component in declared
            order (v_x, v_y, F11, F12, F21, F22, M1, M2, M3)

The payload stores grid samples, so files round-trip bit-exactly; state
reconstruction from grids reprojects velocity onto the mode basis and is
exact to floating-point round-off.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .bases import VelocityBasis
from .diagnostics import LEDGER_COLUMNS, EnergyLedger
from .domain import Domain
from .integrators import SimState

MAGIC = b"MES1"
FIELD_LIST = ["v:2", "F:4", "M:3"]
NCOMP = 9


class SnapshotError(IOError):
    """Malformed or truncated snapshot file."""


def state_to_grids(state: SimState) -> np.ndarray:
    """(9, n, n) grid payload in the declared component order."""
    d = state.domain
    v = d.backward(state.basis.synthesize_coeffs(state.g))
    F = d.backward(state.Fh)
    M = d.backward(state.Mh)
    return np.concatenate([v, F, M], axis=0)


def state_from_grids(grids: np.ndarray, t: float, domain: Domain,
                     basis: VelocityBasis) -> SimState:
    vhat = domain.forward(grids[0:2])
    g = basis.project_coeffs(vhat)
    Fh = domain.forward(grids[2:6])
    Mh = domain.forward(grids[6:9])
    return SimState(t, g, Fh, Mh, domain, basis)


def write_snapshot(path: str | Path, state: SimState) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    d = state.domain
    header = json.dumps({"n": d.n, "l": d.l, "t": state.t, "endian": "little",
                         "fields": FIELD_LIST}).encode()
    payload = np.ascontiguousarray(state_to_grids(state), dtype="<f8")
    try:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<I", len(header)))
            fh.write(header)
            fh.write(payload.tobytes())
    except OSError as err:
        raise SnapshotError(f"cannot write snapshot {path}: {err}") from None
    return path


def read_snapshot_grids(path: str | Path) -> tuple[np.ndarray, dict]:
    """Raw (9, n, n) payload plus header; validates magic and sizes."""
    path = Path(path)
    try:
        blob = Path(path).read_bytes()
    except OSError as err:
        raise SnapshotError(f"cannot read snapshot {path}: {err}") from None
    if len(blob) < 8 or blob[:4] != MAGIC:
        raise SnapshotError(f"{path}: bad magic, not a snapshot file")
    (hlen,) = struct.unpack("<I", blob[4:8])
    if len(blob) < 8 + hlen:
        raise SnapshotError(f"{path}: truncated header")
    try:
        header = json.loads(blob[8:8 + hlen].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise SnapshotError(f"{path}: corrupt header: {err}") from None
    for key in ("n", "l", "t", "endian", "fields"):
        if key not in header:
            raise SnapshotError(f"{path}: header missing {key!r}")
    if header["endian"] != "little" or header["fields"] != FIELD_LIST:
        raise SnapshotError(f"{path}: unsupported layout {header}")
    n = int(header["n"])
    expected = n * n * NCOMP * 8
    body = blob[8 + hlen:]
    if len(body) != expected:
        raise SnapshotError(f"{path}: payload is {len(body)} bytes, expected {expected}")
    grids = np.frombuffer(body, dtype="<f8").reshape(NCOMP, n, n).astype(float)
    return grids, header


def read_snapshot(path: str | Path, domain: Domain | None = None,
                  basis: VelocityBasis | None = None, m: int = 16) -> SimState:
    grids, header = read_snapshot_grids(path)
    n, l = int(header["n"]), float(header["l"])
    if domain is None:
        domain = Domain(n, l)
    elif domain.n != n or abs(domain.l - l) > 1e-12:
        raise SnapshotError(f"{path}: snapshot grid ({n}, l={l}) does not match domain")
    if basis is None:
        basis = VelocityBasis(domain, m)
    return state_from_grids(grids, float(header["t"]), domain, basis)


# -- energy CSV -----------------------------------------------------------------


def write_energy_csv(path: str | Path, rows: list[EnergyLedger]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LEDGER_COLUMNS)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row.as_tuple()])
    return path


def read_energy_csv(path: str | Path) -> dict[str, np.ndarray]:
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(header) != LEDGER_COLUMNS:
                raise SnapshotError(
                    f"{path}: unexpected CSV header {header}, expected {list(LEDGER_COLUMNS)}")
            data = [[float(v) for v in row] for row in reader if row]
    except OSError as err:
        raise SnapshotError(f"cannot read energy CSV {path}: {err}") from None
    arr = np.array(data) if data else np.empty((0, len(LEDGER_COLUMNS)))
    return {name: arr[:, j] for j, name in enumerate(LEDGER_COLUMNS)}
