"""Command-line interface: run, spectra, benchmark, oracle, coeffs.

Exit codes: 0 success, 1 configuration error, 2 numerical failure. The
environment variable SPLITMPS_OUTDIR overrides the configured output
directory. Alpha sweeps fan out over a process pool sized by --jobs.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .benchmark import run_benchmark
from .chainmap import SpectralBath, chain_coefficients, write_coefficients_csv
from .config import FIELD_SECTIONS, SimConfig, load_config
from .ed import build_dense, evolve_dense, spin_up_vacuum
from .errors import NumericalError, ParameterError
from .mps import canonicalize, pad_bonds, spin_boson_product_state
from .mpo import build_spin_boson_mpo, split_full_mpo
from .tdvp import TdvpConfig, evolve
from .timeseries import TimeSeriesWriter, write_timeseries_csv

logger = logging.getLogger(__name__)

OUTDIR_ENV = "SPLITMPS_OUTDIR"


def _metadata(cfg: SimConfig, **extra: str) -> dict[str, str]:
    meta = {"version": __version__}
    meta.update(cfg.to_metadata())
    meta.update(extra)
    return meta


def _tdvp_config(cfg: SimConfig) -> TdvpConfig:
    return TdvpConfig(
        dt=cfg.dt,
        t_max=cfg.t_max,
        scheme=cfg.scheme,
        max_bond=cfg.chi,
        svd_threshold=cfg.svd_threshold,
        krylov_dim=cfg.krylov_dim,
        krylov_tol=cfg.krylov_tol,
        grow_steps=cfg.grow_steps,
        expm_method=cfg.expm_method,
    )


def run_single_alpha(cfg: SimConfig, alpha: float) -> Path:
    """One evolution at a single coupling; streams its own CSV."""
    d_b = cfg.resolved_d_b()
    bath = SpectralBath(s=cfg.s, alpha=alpha, omega_c=cfg.omega_c)
    chain = chain_coefficients(bath, cfg.length, cfg.tn_variant)
    mpo = build_spin_boson_mpo(chain, cfg.delta, d_b)
    if cfg.split_enabled:
        split = split_full_mpo(mpo, cfg.split_threshold)
        sites = split.sites
        k_eff_meta = ",".join(str(k) for k in split.k_eff)
    else:
        sites = mpo.sites
        k_eff_meta = ""
    psi = spin_boson_product_state(cfg.length, d_b, split=cfg.split_enabled)
    if cfg.init_noise > 0:
        pad_bonds(psi, cfg.chi, np.random.default_rng(cfg.seed), eps=cfg.init_noise)
        canonicalize(psi, 0)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{cfg.prefix}_alpha{alpha:g}.csv"
    meta = _metadata(cfg, alpha=repr(float(alpha)), resolved_d_b=str(d_b), k_eff=k_eff_meta)
    logger.info("running alpha=%g -> %s", alpha, out_path)
    with TimeSeriesWriter(out_path, meta) as writer:
        evolve(
            psi,
            sites,
            _tdvp_config(cfg),
            writer=writer,
            checkpoint_path=str(out_path) + ".checkpoint.npz",
        )
    return out_path


def _run_worker(args: tuple[SimConfig, float]) -> str:
    cfg, alpha = args
    # parallel workers each stick to one BLAS thread; the local tensors are
    # far too small for intra-op threading to beat the pool-level parallelism
    with threadpool_limits(1):
        return str(run_single_alpha(cfg, alpha))


def cmd_run(cfg: SimConfig) -> int:
    jobs = cfg.jobs or os.cpu_count() or 1
    alphas = cfg.alpha
    if jobs > 1 and len(alphas) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=min(jobs, len(alphas))) as pool:
            for path in pool.map(_run_worker, [(cfg, a) for a in alphas]):
                logger.info("finished %s", path)
    else:
        for a in alphas:
            run_single_alpha(cfg, a)
    return 0


def cmd_spectra(cfg: SimConfig) -> int:
    d_b = cfg.resolved_d_b()
    bath = SpectralBath(s=cfg.s, alpha=cfg.alpha[0], omega_c=cfg.omega_c)
    chain = chain_coefficients(bath, cfg.length, cfg.tn_variant)
    mpo = build_spin_boson_mpo(chain, cfg.delta, d_b)
    split = split_full_mpo(mpo, cfg.split_threshold)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{cfg.prefix}_spectra.csv"
    with open(out_path, "w", newline="") as fh:
        for key, value in _metadata(cfg, resolved_d_b=str(d_b)).items():
            fh.write(f"# {key} = {value}\n")
        k_eff = ",".join(f"{i + 1}:{k}" for i, k in enumerate(split.k_eff))
        fh.write(f"# k_eff = {k_eff}\n")
        writer = csv.writer(fh)
        writer.writerow(["site", "k", "lambda_k"])
        for i, spectrum in enumerate(split.spectra):
            for k, lam in enumerate(spectrum):
                writer.writerow([i + 1, k + 1, repr(float(lam))])
    print(out_path)
    return 0


def cmd_coeffs(cfg: SimConfig) -> int:
    bath = SpectralBath(s=cfg.s, alpha=cfg.alpha[0], omega_c=cfg.omega_c)
    chain = chain_coefficients(bath, cfg.length, cfg.tn_variant)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{cfg.prefix}_coeffs.csv"
    header = [f"{k} = {v}" for k, v in _metadata(cfg, c0=repr(chain.c0)).items()]
    write_coefficients_csv(chain, out_path, header_lines=header)
    print(out_path)
    return 0


def cmd_oracle(cfg: SimConfig) -> int:
    bath = SpectralBath(s=cfg.s, alpha=cfg.alpha[0], omega_c=cfg.omega_c)
    chain = chain_coefficients(bath, cfg.length, cfg.tn_variant)
    h = build_dense(chain, cfg.delta, cfg.d_b, dim_cap=cfg.dim_cap)
    series = evolve_dense(h, spin_up_vacuum(cfg.d_b, cfg.length), cfg.dt, cfg.t_max)
    series.metadata = _metadata(cfg, integrator="dense")
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{cfg.prefix}_oracle.csv"
    write_timeseries_csv(series, out_path)
    print(out_path)
    return 0


def cmd_benchmark(cfg: SimConfig) -> int:
    report = run_benchmark(cfg)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{cfg.prefix}_benchmark.csv"
    with open(csv_path, "w", newline="") as fh:
        for key, value in _metadata(cfg).items():
            fh.write(f"# {key} = {value}\n")
        writer = csv.writer(fh)
        writer.writerow(["d_b", "basis", "n_sites", "local_dim", "sweep_seconds_median", "status"])
        for p in report.points:
            writer.writerow([p.d_b, p.basis, p.n_sites, p.local_dim, repr(p.median_seconds), p.status])
    summary = report.summary_lines()
    (out_dir / f"{cfg.prefix}_benchmark.txt").write_text("\n".join(summary) + "\n")
    print("\n".join(summary))
    return 0


COMMANDS = {
    "run": cmd_run,
    "spectra": cmd_spectra,
    "benchmark": cmd_benchmark,
    "oracle": cmd_oracle,
    "coeffs": cmd_coeffs,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitmps",
        description="Spin-boson dynamics with split-site MPS/MPO tensor networks.",
    )
    parser.add_argument("--version", action="version", version=f"splitmps {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "TDVP magnetization runs, one CSV per alpha"),
        ("spectra", "dump per-site MPO singular spectra"),
        ("benchmark", "split vs original basis per-sweep timing"),
        ("oracle", "dense small-instance evolution"),
        ("coeffs", "dump chain coefficients"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", nargs="?", default=None, help="INI config file")
        for key, (section, help_str) in FIELD_SECTIONS.items():
            p.add_argument(f"--{key}", dest=key, default=None, metavar="V",
                           help=f"[{section}] {help_str}")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    overrides = {
        key: getattr(args, key)
        for key in FIELD_SECTIONS
        if getattr(args, key, None) is not None
    }
    try:
        cfg = load_config(args.config, overrides)
        if OUTDIR_ENV in os.environ:
            cfg = replace(cfg, out_dir=os.environ[OUTDIR_ENV])
        return COMMANDS[args.command](cfg)
    except ParameterError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
