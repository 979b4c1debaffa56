"""Static figures from magnetoelastic simulator run artifacts."""

from .artifacts import RunArtifacts, SchemaError, read_energy_csv, read_snapshot
from .plots import (fit_order, plot_all, plot_convergence, plot_drift,
                    plot_energy, plot_fields)

__all__ = [
    "RunArtifacts",
    "SchemaError",
    "fit_order",
    "plot_all",
    "plot_convergence",
    "plot_drift",
    "plot_energy",
    "plot_fields",
    "read_energy_csv",
    "read_snapshot",
]

__version__ = "0.1.0"
