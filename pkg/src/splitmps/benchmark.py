"""Wall-clock scaling benchmark: split versus original basis.

Times one-site TDVP sweeps with dense local exponentials, whose cost is cubic
in the local dimension: ~(chi^2 d_b)^3 per site in the original basis versus
two sites at ~(chi^2 sqrt(d_b))^3 after splitting. MPO construction and
splitting are one-time setup and excluded from the timings.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .chainmap import SpectralBath, chain_coefficients
from .config import SimConfig
from .errors import ParameterError
from .mps import canonicalize, pad_bonds, spin_boson_product_state
from .mpo import build_spin_boson_mpo, split_full_mpo
from .tdvp import TdvpConfig, TdvpEngine

logger = logging.getLogger(__name__)

__all__ = ["BenchmarkPoint", "BenchmarkReport", "run_benchmark", "fit_exponent"]


@dataclass
class BenchmarkPoint:
    d_b: int
    basis: str  # "split" | "original"
    n_sites: int
    local_dim: int
    sweep_seconds: list[float] = field(default_factory=list)
    status: str = "ok"  # "ok" | "timeout"

    @property
    def median_seconds(self) -> float:
        return float(np.median(self.sweep_seconds)) if self.sweep_seconds else math.nan


@dataclass
class BenchmarkReport:
    points: list[BenchmarkPoint]
    exponent_split: float
    exponent_original: float
    speedups: dict[int, float]

    def summary_lines(self) -> list[str]:
        lines = [
            "per-sweep wall time, one-site TDVP, dense local exponentials",
            f"fitted cost exponent in d_b: split {self.exponent_split:.2f}, "
            f"original {self.exponent_original:.2f}",
        ]
        for d_b, s in sorted(self.speedups.items()):
            lines.append(f"speedup at d_b={d_b}: {s:.1f}x")
        for p in self.points:
            med = f"{self.median_seconds_str(p)}"
            lines.append(
                f"d_b={p.d_b:4d} {p.basis:8s} sites={p.n_sites:3d} local_dim={p.local_dim:3d} "
                f"sweep={med} [{p.status}]"
            )
        return lines

    @staticmethod
    def median_seconds_str(p: BenchmarkPoint) -> str:
        return f"{p.median_seconds:.4f}s" if p.sweep_seconds else "n/a"


def fit_exponent(d_bs: list[int], times: list[float]) -> float:
    """Least-squares slope of log(time) against log(d_b)."""
    if len(d_bs) < 2:
        return math.nan
    return float(np.polyfit(np.log(d_bs), np.log(times), 1)[0])


def _time_sweeps(point: BenchmarkPoint, engine: TdvpEngine, n_sweeps: int, budget_s: float) -> None:
    for _ in range(n_sweeps):
        tic = time.perf_counter()
        engine.step()
        elapsed = time.perf_counter() - tic
        point.sweep_seconds.append(elapsed)
        if elapsed > budget_s:
            point.status = "timeout"
            logger.warning(
                "d_b=%d %s: sweep took %.1fs > budget %.1fs; point marked timeout",
                point.d_b, point.basis, elapsed, budget_s,
            )
            break


def run_benchmark(cfg: SimConfig) -> BenchmarkReport:
    """Time split and original-basis sweeps across the configured d_b list."""
    for d_b in cfg.bench_d_b:
        if math.isqrt(d_b) ** 2 != d_b:
            raise ParameterError(f"benchmark d_b values must be perfect squares, got {d_b}")
    bath = SpectralBath(s=cfg.s, alpha=cfg.alpha[0], omega_c=cfg.omega_c)
    chain = chain_coefficients(bath, cfg.bench_length, cfg.tn_variant)
    tdvp_cfg = TdvpConfig(
        dt=cfg.bench_dt,
        t_max=cfg.bench_dt * max(cfg.bench_sweeps, 1),
        scheme="one_site",
        max_bond=cfg.chi,
        krylov_dim=cfg.krylov_dim,
        krylov_tol=cfg.krylov_tol,
        expm_method="dense",
    )
    points: list[BenchmarkPoint] = []
    for d_b in sorted(cfg.bench_d_b):
        mpo = build_spin_boson_mpo(chain, cfg.delta, d_b)
        split = split_full_mpo(mpo, cfg.split_threshold)
        for basis, sites in (("split", split.sites), ("original", mpo.sites)):
            psi = spin_boson_product_state(cfg.bench_length, d_b, split=(basis == "split"))
            pad_bonds(psi, cfg.chi, np.random.default_rng(cfg.seed), eps=max(cfg.init_noise, 1e-8))
            engine = TdvpEngine(canonicalize(psi, 0), sites, tdvp_cfg)
            point = BenchmarkPoint(
                d_b=d_b, basis=basis, n_sites=len(sites), local_dim=max(w.shape[1] for w in sites)
            )
            _time_sweeps(point, engine, cfg.bench_sweeps, cfg.bench_budget_s)
            points.append(point)
            logger.info(
                "benchmark d_b=%d %s: median %.4fs over %d sweeps (%s)",
                d_b, basis, point.median_seconds, len(point.sweep_seconds), point.status,
            )

    def series(basis: str) -> tuple[list[int], list[float]]:
        ok = [p for p in points if p.basis == basis and p.status == "ok" and p.sweep_seconds]
        return [p.d_b for p in ok], [p.median_seconds for p in ok]

    split_x, split_t = series("split")
    orig_x, orig_t = series("original")
    speedups: dict[int, float] = {}
    for d_b in cfg.bench_d_b:
        pair = {p.basis: p for p in points if p.d_b == d_b and p.sweep_seconds}
        if "split" in pair and "original" in pair:
            speedups[d_b] = pair["original"].median_seconds / pair["split"].median_seconds
    return BenchmarkReport(
        points=points,
        exponent_split=fit_exponent(split_x, split_t),
        exponent_original=fit_exponent(orig_x, orig_t),
        speedups=speedups,
    )
