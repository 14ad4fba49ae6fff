"""Power-law spectral baths and their nearest-neighbor chain representation.

A bath J(w) = 2*pi*alpha * w^s * w_c^(1-s) on [0, w_c] maps unitarily onto a
tight-binding chain of bosonic modes with closed-form site energies omega_n,
hoppings t_n, and a spin coupling c0 to the first mode only. Two t_n variants
are provided: ``paper`` keeps the printed denominator (s+2+2n)(3+s+3n), while
``literature`` uses (s+2+2n)(3+s+2n), which has the correct Wilson-chain
asymptote t_n -> w_c/4.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterError

__all__ = [
    "SpectralBath",
    "ChainCoefficients",
    "spectral_density",
    "chain_coefficients",
    "write_coefficients_csv",
    "TN_VARIANTS",
]

TN_VARIANTS = ("paper", "literature")


@dataclass(frozen=True)
class SpectralBath:
    """Ohmicity exponent ``s`` > 0, coupling ``alpha`` >= 0, cutoff ``omega_c`` > 0."""

    s: float
    alpha: float
    omega_c: float = 1.0

    def __post_init__(self) -> None:
        if self.s <= 0:
            raise ParameterError(f"bath exponent s must be positive, got {self.s}")
        if self.alpha < 0:
            raise ParameterError(f"coupling alpha must be non-negative, got {self.alpha}")
        if self.omega_c <= 0:
            raise ParameterError(f"cutoff omega_c must be positive, got {self.omega_c}")


def spectral_density(bath: SpectralBath, omega) -> np.ndarray | float:
    """J(w) = 2*pi*alpha * w^s * w_c^(1-s) on 0 <= w <= w_c, zero outside."""
    w = np.asarray(omega, dtype=float)
    inside = (w >= 0) & (w <= bath.omega_c)
    val = np.zeros_like(w)
    val[inside] = 2 * np.pi * bath.alpha * w[inside] ** bath.s * bath.omega_c ** (1 - bath.s)
    return val if val.ndim else float(val)


@dataclass(frozen=True)
class ChainCoefficients:
    """Chain of ``length`` bosonic modes: energies omega[0..L-1], hoppings t[0..L-2]."""

    omega: np.ndarray
    t: np.ndarray
    c0: float
    length: int
    tn_variant: str

    def __post_init__(self) -> None:
        if len(self.omega) != self.length or len(self.t) != max(self.length - 1, 0):
            raise ParameterError("coefficient array lengths inconsistent with chain length")


def _omega_n(s: float, omega_c: float, n: np.ndarray) -> np.ndarray:
    return (omega_c / 2) * (1 + s**2 / ((s + 2 * n) * (2 + s + 2 * n)))


def _t_n(s: float, omega_c: float, n: np.ndarray, variant: str) -> np.ndarray:
    if variant == "paper":
        den = (s + 2 + 2 * n) * (3 + s + 3 * n)
    elif variant == "literature":
        den = (s + 2 + 2 * n) * (3 + s + 2 * n)
    else:
        raise ParameterError(f"unknown t_n variant {variant!r}, expected one of {TN_VARIANTS}")
    return omega_c * (1 + n) * (1 + s + n) / den * np.sqrt((3 + s + 2 * n) / (1 + s + 2 * n))


def chain_coefficients(bath: SpectralBath, length: int, variant: str = "paper") -> ChainCoefficients:
    """Closed-form chain coefficients for the truncated chain of ``length`` modes.

    The last mode has no outgoing hopping; the spin couples to mode 0 with
    c0 = omega_c * sqrt(alpha / (2 (1+s))).
    """
    if length < 1:
        raise ParameterError(f"chain length must be >= 1, got {length}")
    n = np.arange(length, dtype=float)
    omega = _omega_n(bath.s, bath.omega_c, n)
    t = _t_n(bath.s, bath.omega_c, n[:-1], variant)
    c0 = bath.omega_c * np.sqrt(bath.alpha / (2 * (1 + bath.s)))
    return ChainCoefficients(omega=omega, t=t, c0=float(c0), length=length, tn_variant=variant)


def write_coefficients_csv(chain: ChainCoefficients, path: str | Path, header_lines: list[str] | None = None) -> None:
    """Dump n, omega_n, t_n rows; the final row has no outgoing hopping."""
    with open(path, "w", newline="") as fh:
        for line in header_lines or []:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["n", "omega_n", "t_n"])
        for i in range(chain.length):
            t_val = repr(float(chain.t[i])) if i < chain.length - 1 else ""
            writer.writerow([i, repr(float(chain.omega[i])), t_val])
