"""Sectioned key=value run configuration: parsing, validation, defaults, and
a round-trippable echo of the effective configuration."""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .domain import ConfigurationError
from .params import PRESETS, ElasticLaw, ExternalField, ModelParams

INITIAL_PRESETS = ("zero", "taylor_green", "generic_small", "file")
DEALIAS_RULES = ("half", "two_thirds")
MODES = ("monolithic", "fixed_point")


@dataclass
class RunConfig:
    """Validated configuration of one simulation run."""

    # [domain]
    n: int = 32
    l: float = 6.283185307179586
    # [params]
    nu: float = 0.1
    kappa: float = 0.1
    a_exch: float = 0.5
    mu0: float = 1.0
    gamma_llg: float = 1.0
    lambda_llg: float = 1.0
    c_e: float = 0.01
    # [run]
    dt: float = 1e-3
    T: float = 1.0
    mode: str = "monolithic"
    m_velocity_modes: int = 16
    tau: float = 0.05
    fp_tol: float = 1e-10
    fp_max_iter: int = 40
    dealias_rule: str = "half"
    renormalize_M: bool = False
    output_stride: int = 1
    # [initial]
    preset: str = "zero"
    seed: int = 0
    amp_v: float = 0.05
    amp_m: float = 0.1
    band: int = 1
    file: str = ""
    # [hext]
    hext_preset: str = "zero"
    h0: float = 0.0
    omega: float = 0.0
    direction: tuple = (0.0, 0.0, 1.0)
    grad_axis: int = 0
    # [output]
    directory: str = "runs/out"

    def model_params(self) -> ModelParams:
        return ModelParams(nu=self.nu, kappa=self.kappa, a_exch=self.a_exch,
                           mu0=self.mu0, gamma_llg=self.gamma_llg,
                           lambda_llg=self.lambda_llg, elastic=ElasticLaw(c_e=self.c_e))

    def external_field(self) -> ExternalField:
        return ExternalField(self.hext_preset, self.h0, self.omega,
                             tuple(self.direction), self.grad_axis)


_SCHEMA = {
    "domain": {"n": int, "l": float},
    "params": {"nu": float, "kappa": float, "a_exch": float, "mu0": float,
               "gamma_llg": float, "lambda_llg": float, "c_e": float},
    "run": {"dt": float, "T": float, "mode": str, "m_velocity_modes": int,
            "tau": float, "fp_tol": float, "fp_max_iter": int,
            "dealias_rule": str, "renormalize_M": bool, "output_stride": int},
    "initial": {"preset": str, "seed": int, "amp_v": float, "amp_m": float,
                "band": int, "file": str},
    "hext": {"hext_preset": str, "h0": float, "omega": float,
             "direction": tuple, "grad_axis": int},
    "output": {"directory": str},
}


def _parse_value(section: str, key: str, raw: str, typ):
    try:
        if typ is bool:
            low = raw.strip().lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if typ is tuple:
            parts = [float(p) for p in raw.replace(",", " ").split()]
            return tuple(parts)
        return typ(raw)
    except ValueError as err:
        raise ConfigurationError(f"[{section}] {key}: {err}") from None


def parse_config(path: str | Path) -> RunConfig:
    """Read, validate, and default-fill a configuration file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"configuration file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys are case-sensitive (T vs t)
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except configparser.Error as err:
        raise ConfigurationError(f"{path}: {err}") from None

    values: dict = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigurationError(f"{path}: unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigurationError(f"{path}: unknown key {key!r} in section [{section}]")
            values[key] = _parse_value(section, key, raw, _SCHEMA[section][key])

    cfg = RunConfig(**values)
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    checks = [
        (cfg.n >= 8 and (cfg.n & (cfg.n - 1)) == 0, "n", "must be a power of two >= 8"),
        (cfg.l > 0, "l", "must be positive"),
        (cfg.nu > 0, "nu", "must be positive"),
        (cfg.kappa >= 0, "kappa", "must be nonnegative"),
        (cfg.a_exch > 0, "a_exch", "must be positive"),
        (cfg.mu0 > 0, "mu0", "must be positive"),
        (cfg.gamma_llg > 0, "gamma_llg", "must be positive"),
        (cfg.lambda_llg > 0, "lambda_llg", "must be positive"),
        (cfg.c_e > 0, "c_e", "must be positive"),
        (cfg.dt > 0, "dt", "must be positive"),
        (cfg.T > 0, "T", "must be positive"),
        (cfg.dt <= cfg.T, "dt", "must not exceed T"),
        (cfg.mode in MODES, "mode", f"must be one of {MODES}"),
        (cfg.m_velocity_modes >= 1, "m_velocity_modes", "must be at least 1"),
        (cfg.tau > 0, "tau", "must be positive"),
        (cfg.fp_tol > 0, "fp_tol", "must be positive"),
        (cfg.fp_max_iter >= 1, "fp_max_iter", "must be at least 1"),
        (cfg.dealias_rule in DEALIAS_RULES, "dealias_rule", f"must be one of {DEALIAS_RULES}"),
        (cfg.output_stride >= 1, "output_stride", "must be at least 1"),
        (cfg.preset in INITIAL_PRESETS, "preset", f"must be one of {INITIAL_PRESETS}"),
        (cfg.band >= 1, "band", "must be at least 1"),
        (cfg.preset != "file" or bool(cfg.file), "file", "required when preset = file"),
        (cfg.hext_preset in PRESETS, "hext_preset", f"must be one of {PRESETS}"),
        (len(cfg.direction) == 3, "direction", "needs three components"),
        (cfg.grad_axis in (0, 1), "grad_axis", "must be 0 or 1"),
    ]
    for ok, key, msg in checks:
        if not ok:
            raise ConfigurationError(f"invalid configuration: {key} {msg}")


def echo_config(cfg: RunConfig) -> str:
    """Serialize back into the sectioned key=value format (parse-stable)."""
    by_section: dict[str, list[str]] = {}
    d = asdict(cfg)
    for section, keys in _SCHEMA.items():
        lines = []
        for key in keys:
            value = d[key]
            if isinstance(value, tuple):
                value = " ".join(repr(v) for v in value)
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        by_section[section] = lines
    return "\n".join(f"[{s}]\n" + "\n".join(lines) + "\n" for s, lines in by_section.items())


def write_effective_config(cfg: RunConfig, directory: str | Path) -> Path:
    out = Path(directory) / "effective.cfg"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(echo_config(cfg))
    return out
