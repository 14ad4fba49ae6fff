"""Run configuration: INI-style files with per-key CLI overrides.

Every key lives in a section of a flat ``key = value`` file and can be
overridden on the command line as ``--key value``. The fully resolved
configuration is embedded verbatim in every output file for provenance.
"""

from __future__ import annotations

import configparser
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .errors import ParameterError
from .mpo import next_perfect_square

logger = logging.getLogger(__name__)

# (section, key) -> help text; order defines file layout and CLI listing
FIELD_SECTIONS: dict[str, tuple[str, str]] = {
    "s": ("bath", "bath exponent (1 Ohmic, <1 sub-Ohmic, >1 super-Ohmic)"),
    "alpha": ("bath", "coupling strength; comma list fans out one run per value"),
    "omega_c": ("bath", "bath frequency cutoff"),
    "delta": ("system", "bare tunneling amplitude"),
    "d_b": ("system", "Fock levels per bosonic mode"),
    "length": ("system", "number of bosonic chain modes"),
    "tn_variant": ("system", "hopping formula: 'paper' or 'literature'"),
    "split_enabled": ("split", "evolve on the split lattice"),
    "split_threshold": ("split", "relative singular-value cutoff for the MPO split"),
    "dt": ("tdvp", "time step (units 1/omega_c)"),
    "t_max": ("tdvp", "final time"),
    "scheme": ("tdvp", "two_site | one_site | hybrid"),
    "chi": ("tdvp", "MPS bond dimension cap"),
    "svd_threshold": ("tdvp", "relative truncation threshold for two-site splits"),
    "krylov_dim": ("tdvp", "maximum Lanczos subspace dimension"),
    "krylov_tol": ("tdvp", "Lanczos residual tolerance"),
    "grow_steps": ("tdvp", "two-site growth steps in hybrid scheme"),
    "expm_method": ("tdvp", "krylov | dense local exponentials"),
    "init_noise": ("tdvp", "bond-padding noise amplitude for one-site starts"),
    "out_dir": ("output", "output directory (env SPLITMPS_OUTDIR overrides)"),
    "prefix": ("output", "output file prefix"),
    "seed": ("output", "rng seed for perturbative initialization"),
    "jobs": ("output", "parallel workers for alpha sweeps (0 = all cores)"),
    "bench_d_b": ("benchmark", "local dimensions to benchmark"),
    "bench_length": ("benchmark", "bosonic modes in benchmark chains"),
    "bench_sweeps": ("benchmark", "timed sweeps per point"),
    "bench_budget_s": ("benchmark", "per-sweep time budget; slower points marked timeout"),
    "bench_dt": ("benchmark", "time step used for benchmark sweeps"),
    "dim_cap": ("oracle", "maximum dense Hilbert-space dimension"),
}


@dataclass
class SimConfig:
    s: float = 1.0
    alpha: list[float] = field(default_factory=lambda: [1.0])
    omega_c: float = 1.0
    delta: float = 0.1
    d_b: int = 100
    length: int = 100
    tn_variant: str = "paper"
    split_enabled: bool = True
    split_threshold: float = 1e-12
    dt: float = 0.1
    t_max: float = 100.0
    scheme: str = "two_site"
    chi: int = 5
    svd_threshold: float = 1e-12
    krylov_dim: int = 20
    krylov_tol: float = 1e-10
    grow_steps: int = 5
    expm_method: str = "krylov"
    init_noise: float = 0.0
    out_dir: str = "out"
    prefix: str = "run"
    seed: int = 0
    jobs: int = 0
    bench_d_b: list[int] = field(default_factory=lambda: [16, 36, 64, 100, 144])
    bench_length: int = 4
    bench_sweeps: int = 3
    bench_budget_s: float = 900.0
    bench_dt: float = 0.05
    dim_cap: int = 4096

    def validate(self) -> "SimConfig":
        if self.s <= 0:
            raise ParameterError(f"s must be positive, got {self.s}")
        if not self.alpha or any(a < 0 for a in self.alpha):
            raise ParameterError(f"alpha values must be non-negative, got {self.alpha}")
        if self.omega_c <= 0:
            raise ParameterError(f"omega_c must be positive, got {self.omega_c}")
        if self.d_b < 2:
            raise ParameterError(f"d_b must be >= 2, got {self.d_b}")
        if self.length < 1:
            raise ParameterError(f"length must be >= 1, got {self.length}")
        if self.tn_variant not in ("paper", "literature"):
            raise ParameterError(f"tn_variant must be 'paper' or 'literature', got {self.tn_variant!r}")
        if self.dt <= 0 or self.t_max < self.dt:
            raise ParameterError(f"need 0 < dt <= t_max, got dt={self.dt}, t_max={self.t_max}")
        if self.chi < 1:
            raise ParameterError(f"chi must be >= 1, got {self.chi}")
        if self.krylov_dim < 3:
            raise ParameterError(f"krylov_dim must be >= 3, got {self.krylov_dim}")
        if self.scheme not in ("two_site", "one_site", "hybrid"):
            raise ParameterError(f"unknown scheme {self.scheme!r}")
        if self.expm_method not in ("krylov", "dense"):
            raise ParameterError(f"unknown expm_method {self.expm_method!r}")
        if self.init_noise < 0:
            raise ParameterError(f"init_noise must be >= 0, got {self.init_noise}")
        if self.jobs < 0:
            raise ParameterError(f"jobs must be >= 0, got {self.jobs}")
        return self

    def resolved_d_b(self) -> int:
        """Split evolution needs a perfect square; round up and warn otherwise."""
        if not self.split_enabled:
            return self.d_b
        sq = next_perfect_square(self.d_b)
        if sq != self.d_b:
            logger.warning(
                "d_b=%d is not a perfect square; padding to %d (extra levels start unoccupied)",
                self.d_b, sq,
            )
        return sq

    def to_metadata(self) -> dict[str, str]:
        """Flat key = value view of the resolved configuration."""
        meta: dict[str, str] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, list):
                meta[f.name] = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
            elif isinstance(value, float):
                meta[f.name] = repr(value)
            else:
                meta[f.name] = str(value)
        return meta


def _parse_value(name: str, raw: str, target: Any) -> Any:
    raw = raw.strip()
    try:
        if isinstance(target, bool):
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(target, int):
            return int(raw)
        if isinstance(target, float):
            return float(raw)
        if isinstance(target, list):
            items = [tok for tok in raw.replace(";", ",").split(",") if tok.strip()]
            if target and isinstance(target[0], int) and all("." not in it and "e" not in it.lower() for it in items):
                return [int(it) for it in items]
            return [float(it) for it in items]
        return raw
    except ValueError as exc:
        raise ParameterError(f"cannot parse {name} = {raw!r}") from exc


def load_config(path: str | Path | None = None, overrides: dict[str, str] | None = None) -> SimConfig:
    """Defaults, then the config file, then CLI overrides; validated at the end."""
    cfg = SimConfig()
    if path is not None:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        read = parser.read(path)
        if not read:
            raise ParameterError(f"config file {path} not found or unreadable")
        known = {f.name: f for f in fields(cfg)}
        for section in parser.sections():
            for key, raw in parser.items(section):
                if key not in known:
                    raise ParameterError(f"unknown config key {key!r} in [{section}]")
                setattr(cfg, key, _parse_value(key, raw, getattr(cfg, key)))
    for key, raw in (overrides or {}).items():
        known = {f.name for f in fields(cfg)}
        if key not in known:
            raise ParameterError(f"unknown config key {key!r}")
        setattr(cfg, key, _parse_value(key, raw, getattr(cfg, key)))
    return cfg.validate()


def write_config_template(path: str | Path) -> None:
    """Emit a commented template with all defaults."""
    cfg = SimConfig()
    lines: list[str] = []
    current = None
    for f in fields(cfg):
        section, help_text = FIELD_SECTIONS[f.name]
        if section != current:
            lines.append(f"\n[{section}]")
            current = section
        meta = cfg.to_metadata()
        lines.append(f"# {help_text}")
        lines.append(f"{f.name} = {meta[f.name]}")
    Path(path).write_text("\n".join(lines).lstrip() + "\n")
