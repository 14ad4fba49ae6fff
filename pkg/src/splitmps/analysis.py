"""Post-processing of magnetization series: damped-cosine fits.

Underdamped spin dynamics oscillates at a coupling-renormalized frequency
delta_r = delta * (delta/omega_c)^(alpha/(1-alpha)); the fit extracts the
observed frequency and damping rate. Series without at least two zero
crossings are reported as non-oscillatory rather than force-fitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

__all__ = ["FrequencyFit", "delta_r", "count_zero_crossings", "analyze_frequency", "analyze_series"]


def delta_r(delta: float, omega_c: float, alpha: float) -> float:
    """Renormalized tunneling frequency delta * (delta/omega_c)^(alpha/(1-alpha))."""
    if alpha >= 1:
        return 0.0
    return delta * (delta / omega_c) ** (alpha / (1 - alpha))


def count_zero_crossings(values: np.ndarray) -> int:
    signs = np.sign(values)
    signs = signs[signs != 0]
    return int(np.count_nonzero(np.diff(signs) != 0))


@dataclass(frozen=True)
class FrequencyFit:
    oscillatory: bool
    frequency: float
    damping: float
    amplitude: float
    phase: float
    offset: float
    rms_residual: float
    n_zero_crossings: int


_NO_OSCILLATION = dict(
    frequency=math.nan, damping=math.nan, amplitude=math.nan,
    phase=math.nan, offset=math.nan, rms_residual=math.nan,
)


def _model(t, amp, gamma, omega, phase, offset):
    return amp * np.exp(-gamma * t) * np.cos(omega * t + phase) + offset


def analyze_series(series) -> FrequencyFit:
    """Fit a recorded magnetization TimeSeries."""
    return analyze_frequency(np.asarray(series.t), np.asarray(series.sz))


def analyze_frequency(t: np.ndarray, sz: np.ndarray) -> FrequencyFit:
    """Fit sz(t) = A exp(-g t) cos(w t + phi) + C to an underdamped series."""
    t = np.asarray(t, dtype=float)
    sz = np.asarray(sz, dtype=float)
    offset0 = float(np.mean(sz[-max(len(sz) // 10, 2):]))
    crossings = count_zero_crossings(sz - offset0)
    if crossings < 2:
        return FrequencyFit(oscillatory=False, n_zero_crossings=crossings, **_NO_OSCILLATION)

    cross_times = t[1:][np.diff(np.sign(sz - offset0)) != 0]
    spacing = float(np.mean(np.diff(cross_times))) if len(cross_times) > 1 else float(t[-1] / 2)
    omega0 = math.pi / spacing
    amp0 = float(sz[0] - offset0)
    half = len(sz) // 2
    early = float(np.max(np.abs(sz[:half] - offset0)))
    late = float(np.max(np.abs(sz[half:] - offset0)))
    gamma0 = 0.0
    if late > 0 and early > late:
        gamma0 = 2 * math.log(early / late) / float(t[-1] - t[0])
    p0 = [amp0 if amp0 else 1.0, max(gamma0, 1e-6), omega0, 0.0, offset0]
    try:
        popt, _ = scipy.optimize.curve_fit(
            _model, t, sz, p0=p0,
            bounds=([-2.0, 0.0, 0.0, -math.pi, -1.0], [2.0, 10.0, 20 * omega0, math.pi, 1.0]),
            maxfev=20000,
        )
    except (RuntimeError, ValueError):
        return FrequencyFit(oscillatory=False, n_zero_crossings=crossings, **_NO_OSCILLATION)
    resid = sz - _model(t, *popt)
    return FrequencyFit(
        oscillatory=True,
        amplitude=float(popt[0]),
        damping=float(popt[1]),
        frequency=float(popt[2]),
        phase=float(popt[3]),
        offset=float(popt[4]),
        rms_residual=float(np.sqrt(np.mean(resid**2))),
        n_zero_crossings=crossings,
    )
