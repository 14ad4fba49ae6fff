"""TDVP time evolution of an MPS under an MPO on the same lattice.

Implements the symmetric second-order sweep schemes:

  * ``one_site``  — fixed bond dimensions; exactly norm- and energy-conserving
    up to the local-exponential tolerance.
  * ``two_site``  — merges neighboring sites, evolves, and splits with SVD
    truncation to the bond cap; grows bonds naturally from a product state.
  * ``hybrid``    — a configurable number of two-site growth steps, then
    one-site sweeps (the cheap fixed-rank production mode).

Local exponentials exp(-i H_eff dt/2) are applied with a Lanczos Krylov
iteration on an explicitly assembled effective-Hamiltonian matrix; the
``dense`` method instead diagonalizes H_eff, whose cubic cost in the local
dimension is what the split basis is designed to shrink.

Environment tensors carry legs (bra_bond, mpo_bond, ket_bond); MPS tensors
(left, phys, right); MPO tensors (w_left, s_up, s_low, w_right).
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import NumericalError, ParameterError
from .mps import MPS, all_bond_entropies, canonicalize, entropy_from_schmidt
from .timeseries import TimeSeries, TimeSeriesWriter

__all__ = [
    "TdvpConfig",
    "Environment",
    "krylov_expm_apply",
    "init_environment",
    "tdvp_sweep",
    "evolve",
    "TdvpEngine",
    "mpo_expectation",
]

logger = logging.getLogger(__name__)

SCHEMES = ("two_site", "one_site", "hybrid")
EXPM_METHODS = ("krylov", "dense")
HERMITICITY_TOL = 1e-8


@dataclass
class TdvpConfig:
    dt: float = 0.1
    t_max: float = 10.0
    scheme: str = "two_site"
    max_bond: int = 5
    svd_threshold: float = 1e-12
    krylov_dim: int = 20
    krylov_tol: float = 1e-10
    grow_steps: int = 5
    expm_method: str = "krylov"

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if self.t_max < self.dt:
            raise ParameterError(f"t_max={self.t_max} smaller than dt={self.dt}")
        if self.scheme not in SCHEMES:
            raise ParameterError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.krylov_dim < 3:
            raise ParameterError(f"krylov_dim must be >= 3, got {self.krylov_dim}")
        if self.max_bond < 1:
            raise ParameterError(f"max_bond must be >= 1, got {self.max_bond}")
        if self.expm_method not in EXPM_METHODS:
            raise ParameterError(f"expm_method must be one of {EXPM_METHODS}")

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.t_max / self.dt - 1e-9))


@dataclass
class Environment:
    """Cached partial contractions: left[i] covers sites < i, right[i] sites > i."""

    left: list[np.ndarray] = field(default_factory=list)
    right: list[np.ndarray] = field(default_factory=list)


def krylov_expm_apply(
    matvec: Callable[[np.ndarray], np.ndarray],
    v: np.ndarray,
    tau: complex,
    max_dim: int = 20,
    tol: float = 1e-10,
    herm_tol: float | None = HERMITICITY_TOL,
) -> np.ndarray:
    """Approximate exp(tau * H) v for a Hermitian linear map via Lanczos.

    Stops early when the standard residual estimate drops below ``tol`` or the
    Krylov space becomes invariant (happy breakdown), in which case the result
    is exact on that subspace. A significantly complex Rayleigh quotient means
    the map is not Hermitian and raises NumericalError.
    """
    v = np.ascontiguousarray(v)
    beta0 = np.linalg.norm(v)
    if beta0 == 0:
        return v.copy()
    n = v.size
    basis = np.empty((max_dim, n), dtype=complex)
    basis[0] = v / beta0
    alphas = np.empty(max_dim)
    betas = np.empty(max(max_dim - 1, 1))
    w = matvec(basis[0])
    u = np.array([1.0 + 0j])
    j = 0
    for j in range(max_dim):
        if j > 0:
            w = w - betas[j - 1] * basis[j - 1]
        a = np.vdot(basis[j], w)
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise NumericalError(f"non-finite Rayleigh quotient at Lanczos step {j}")
        if herm_tol is not None and abs(a.imag) > herm_tol * (1 + abs(a)):
            raise NumericalError(
                f"effective Hamiltonian is not Hermitian: Rayleigh quotient {a} "
                f"at Lanczos step {j}"
            )
        alphas[j] = a.real
        w = w - alphas[j] * basis[j]
        # one full reorthogonalization pass keeps the basis clean for tight tol
        w -= basis[: j + 1].T @ (basis[: j + 1].conj() @ w)
        u = _expm_tridiag_e0(alphas[: j + 1], betas[:j], tau)
        if j == max_dim - 1:
            break
        b = np.linalg.norm(w)
        scale = max(1.0, float(np.max(np.abs(alphas[: j + 1]))))
        if b <= 1e-14 * scale:  # invariant subspace: current result is exact
            break
        if b * abs(u[-1]) <= tol:
            break
        betas[j] = b
        basis[j + 1] = w / b
        w = matvec(basis[j + 1])
    return beta0 * (u @ basis[: j + 1])


def _expm_tridiag_e0(alphas: np.ndarray, betas: np.ndarray, tau: complex) -> np.ndarray:
    """exp(tau * T) e_0 for the real symmetric tridiagonal Lanczos matrix T."""
    evals, evecs = scipy.linalg.eigh_tridiagonal(alphas, betas)
    return evecs @ (np.exp(tau * evals) * evecs[0].conj())


def _dense_expm_apply(h: np.ndarray, v: np.ndarray, tau: complex) -> np.ndarray:
    """exp(tau * H) v by full eigendecomposition (cubic in the local dimension)."""
    if h.shape[0] <= 1024:
        dev = np.max(np.abs(h - h.conj().T))
        if dev > HERMITICITY_TOL * (1 + np.max(np.abs(h))):
            raise NumericalError(f"effective Hamiltonian is not Hermitian (deviation {dev:.3g})")
    evals, evecs = np.linalg.eigh(h)
    return evecs @ (np.exp(tau * evals) * (evecs.conj().T @ v))


# ---------------------------------------------------------------------------
# environment contractions


def _trivial_env() -> np.ndarray:
    return np.ones((1, 1, 1), dtype=complex)


def update_left_env(env: np.ndarray, a: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Absorb one (site, MPO) column into a left environment."""
    t = np.tensordot(env, a, (2, 0))          # [b, wl, s, r]
    t = np.tensordot(t, w, ((1, 2), (0, 2)))  # [b, r, su, wr]
    t = np.tensordot(a.conj(), t, ((0, 1), (0, 2)))  # [b', r, wr]
    return t.transpose(0, 2, 1)


def update_right_env(env: np.ndarray, a: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Absorb one (site, MPO) column into a right environment."""
    t = np.tensordot(a, env, (2, 2))          # [l, s, b', wr]
    t = np.tensordot(w, t, ((2, 3), (1, 3)))  # [wl, su, l, b']
    return np.tensordot(a.conj(), t, ((1, 2), (1, 3)))  # [b, wl, l]


def init_environment(psi: MPS, mpo_sites: Sequence[np.ndarray]) -> Environment:
    """Right environments for a sweep starting at site 0 (left ones are filled lazily)."""
    n = psi.length
    env = Environment(left=[None] * n, right=[None] * n)
    env.left[0] = _trivial_env()
    env.right[n - 1] = _trivial_env()
    for i in range(n - 1, 0, -1):
        env.right[i - 1] = update_right_env(env.right[i], psi.tensors[i], mpo_sites[i])
    return env


def mpo_expectation(psi: MPS, mpo_sites: Sequence[np.ndarray]) -> float:
    """<psi|H|psi> / <psi|psi> for a Hermitian MPO."""
    env = _trivial_env()
    norm_env = np.ones((1, 1), dtype=complex)
    for a, w in zip(psi.tensors, mpo_sites):
        env = update_left_env(env, a, np.asarray(w, dtype=complex))
        t = np.tensordot(norm_env, a, (1, 0))
        norm_env = np.tensordot(a.conj(), t, ((0, 1), (0, 1)))
    return float((env[0, 0, 0] / norm_env[0, 0]).real)


# ---------------------------------------------------------------------------
# engine


class TdvpEngine:
    """Owns the evolving state, its environments, and the sweep logic."""

    def __init__(
        self,
        psi: MPS,
        mpo_sites: Sequence[np.ndarray],
        cfg: TdvpConfig,
        env: Environment | None = None,
    ):
        if len(mpo_sites) != psi.length:
            raise ParameterError("state and operator have different lengths")
        if list(psi.local_dims) != [w.shape[1] for w in mpo_sites]:
            raise ParameterError("state and operator live on different lattices")
        self.psi = psi
        self.ws = [np.ascontiguousarray(w, dtype=complex) for w in mpo_sites]
        self.cfg = cfg
        if psi.center != 0:
            canonicalize(psi, 0)
        self.env = env if env is not None else init_environment(psi, self.ws)
        self.steps_done = 0
        self.last_entropies: list[float] = all_bond_entropies(psi)

    # -- local solvers ------------------------------------------------------

    def _apply_exp(self, h: np.ndarray, v: np.ndarray, tau: complex, where: str) -> np.ndarray:
        try:
            if self.cfg.expm_method == "dense":
                return _dense_expm_apply(h, v, tau)
            return krylov_expm_apply(
                lambda x: h @ x, v, tau, self.cfg.krylov_dim, self.cfg.krylov_tol
            )
        except NumericalError as exc:
            raise NumericalError(f"{exc} ({where}); environments may be corrupted") from exc
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise NumericalError(f"local exponential failed at {where}: {exc}") from exc

    @staticmethod
    def _site_heff_from_lw(lw: np.ndarray, right: np.ndarray) -> np.ndarray:
        # lw[b,k,su,sl,wr] x right[b',wr,k'] -> H[(b,su,b'),(k,sl,k')]
        t = np.tensordot(lw, right, (4, 1))
        b, k, su, sl, bp, kp = t.shape
        return t.transpose(0, 2, 4, 1, 3, 5).reshape(b * su * bp, k * sl * kp)

    @staticmethod
    def _site_heff_from_wr(left: np.ndarray, wr: np.ndarray) -> np.ndarray:
        # left[b,wl,k] x wr[wl,su,sl,b',k'] -> H[(b,su,b'),(k,sl,k')]
        t = np.tensordot(left, wr, (1, 0))
        b, k, su, sl, bp, kp = t.shape
        return t.transpose(0, 2, 4, 1, 3, 5).reshape(b * su * bp, k * sl * kp)

    @staticmethod
    def _bond_heff(left: np.ndarray, right: np.ndarray) -> np.ndarray:
        # left[b,w,k] x right[b',w,k'] -> H[(b,b'),(k,k')]
        t = np.tensordot(left, right, (1, 1))
        b, k, bp, kp = t.shape
        return t.transpose(0, 2, 1, 3).reshape(b * bp, k * kp)

    # -- one-site scheme ----------------------------------------------------

    def _sweep_one_site(self, dt: float) -> None:
        psi, ws, env = self.psi, self.ws, self.env
        n = psi.length
        tau_site = -0.5j * dt
        tau_bond = +0.5j * dt
        entropies = [0.0] * (n - 1)

        for i in range(n):
            lw = np.tensordot(env.left[i], ws[i], (1, 0))  # [b,k,su,sl,wr]
            h = self._site_heff_from_lw(lw, env.right[i])
            a = psi.tensors[i]
            a = self._apply_exp(h, a.ravel(), tau_site, f"site {i}, forward").reshape(a.shape)
            if i == n - 1:
                psi.tensors[i] = a
                break
            l, s, r = a.shape
            q, c = np.linalg.qr(a.reshape(l * s, r))
            q = q.reshape(l, s, q.shape[1])
            psi.tensors[i] = q
            x = np.tensordot(lw, q, ((1, 3), (0, 1)))  # [b,su,wr,k']
            env.left[i + 1] = np.tensordot(q.conj(), x, ((0, 1), (0, 1)))
            hb = self._bond_heff(env.left[i + 1], env.right[i])
            c = self._apply_exp(hb, c.ravel(), tau_bond, f"bond {i}, forward").reshape(c.shape)
            psi.tensors[i + 1] = np.tensordot(c, psi.tensors[i + 1], (1, 0))

        for i in range(n - 1, -1, -1):
            wr = np.tensordot(ws[i], env.right[i], (3, 1))  # [wl,su,sl,b',k']
            h = self._site_heff_from_wr(env.left[i], wr)
            a = psi.tensors[i]
            a = self._apply_exp(h, a.ravel(), tau_site, f"site {i}, backward").reshape(a.shape)
            if i == 0:
                psi.tensors[i] = a
                break
            l, s, r = a.shape
            q2, r2 = np.linalg.qr(a.reshape(l, s * r).conj().T)
            k = q2.shape[1]
            q = q2.conj().T.reshape(k, s, r)
            c = r2.conj().T  # [l, k]
            psi.tensors[i] = q
            x = np.tensordot(wr, q, ((2, 4), (1, 2)))  # [wl,su,b',k]
            env.right[i - 1] = np.tensordot(q.conj(), x, ((1, 2), (1, 2)))
            entropies[i - 1] = entropy_from_schmidt(np.linalg.svd(c, compute_uv=False))
            hb = self._bond_heff(env.left[i], env.right[i - 1])
            c = self._apply_exp(hb, c.ravel(), tau_bond, f"bond {i - 1}, backward").reshape(c.shape)
            psi.tensors[i - 1] = np.tensordot(psi.tensors[i - 1], c, (2, 0))

        psi.center = 0
        self.last_entropies = entropies

    # -- two-site scheme ----------------------------------------------------

    def _two_site_matvec(self, left, w1, w2, right, shape):
        def matvec(x: np.ndarray) -> np.ndarray:
            v = x.reshape(shape)
            t = np.tensordot(left, v, (2, 0))          # [b,wl,s1,s2,k']
            t = np.tensordot(t, w1, ((1, 2), (0, 2)))  # [b,s2,k',su1,wm]
            t = np.tensordot(t, w2, ((1, 4), (2, 0)))  # [b,k',su1,su2,wr]
            t = np.tensordot(t, right, ((1, 4), (2, 1)))  # [b,su1,su2,b']
            return t.ravel()

        return matvec

    def _evolve_pair(self, i: int, theta: np.ndarray, tau: complex) -> np.ndarray:
        mv = self._two_site_matvec(
            self.env.left[i], self.ws[i], self.ws[i + 1], self.env.right[i + 1], theta.shape
        )
        try:
            out = krylov_expm_apply(
                mv, theta.ravel(), tau, self.cfg.krylov_dim, self.cfg.krylov_tol
            )
        except NumericalError as exc:
            raise NumericalError(f"{exc} (pair {i},{i + 1}); environments may be corrupted") from exc
        return out.reshape(theta.shape)

    def _split_pair(self, theta: np.ndarray, center_right: bool) -> tuple[np.ndarray, np.ndarray, float]:
        l, s1, s2, r = theta.shape
        m = theta.reshape(l * s1, s2 * r)
        norm_before = np.linalg.norm(m)
        u, s, vh = np.linalg.svd(m, full_matrices=False)
        keep = int(np.count_nonzero(s >= self.cfg.svd_threshold * s[0])) if s[0] > 0 else 1
        keep = max(1, min(keep, self.cfg.max_bond))
        u, s, vh = u[:, :keep], s[:keep], vh[:keep]
        # truncation loss is renormalized away so the state norm is conserved
        s = s * (norm_before / np.linalg.norm(s))
        entropy = entropy_from_schmidt(s)
        if center_right:
            left_t = u.reshape(l, s1, keep)
            right_t = (s[:, None] * vh).reshape(keep, s2, r)
        else:
            left_t = (u * s).reshape(l, s1, keep)
            right_t = vh.reshape(keep, s2, r)
        return left_t, right_t, entropy

    def _backward_site(self, i: int, dt: float, label: str) -> None:
        lw = np.tensordot(self.env.left[i], self.ws[i], (1, 0))
        h = self._site_heff_from_lw(lw, self.env.right[i])
        a = self.psi.tensors[i]
        a = self._apply_exp(h, a.ravel(), +0.5j * dt, label).reshape(a.shape)
        self.psi.tensors[i] = a

    def _sweep_two_site(self, dt: float) -> None:
        psi, ws, env = self.psi, self.ws, self.env
        n = psi.length
        if n < 2:
            raise ParameterError("two-site scheme needs at least two sites")
        entropies = [0.0] * (n - 1)

        for i in range(n - 2):
            theta = np.tensordot(psi.tensors[i], psi.tensors[i + 1], (2, 0))
            theta = self._evolve_pair(i, theta, -0.5j * dt)
            a, b, _ = self._split_pair(theta, center_right=True)
            psi.tensors[i], psi.tensors[i + 1] = a, b
            env.left[i + 1] = update_left_env(env.left[i], a, ws[i])
            self._backward_site(i + 1, dt, f"site {i + 1}, two-site forward")

        i = n - 2
        theta = np.tensordot(psi.tensors[i], psi.tensors[i + 1], (2, 0))
        theta = self._evolve_pair(i, theta, -1.0j * dt)
        a, b, entropies[i] = self._split_pair(theta, center_right=False)
        psi.tensors[i], psi.tensors[i + 1] = a, b
        env.right[i] = update_right_env(env.right[i + 1], b, ws[i + 1])

        for i in range(n - 3, -1, -1):
            self._backward_site(i + 1, dt, f"site {i + 1}, two-site backward")
            theta = np.tensordot(psi.tensors[i], psi.tensors[i + 1], (2, 0))
            theta = self._evolve_pair(i, theta, -0.5j * dt)
            a, b, entropies[i] = self._split_pair(theta, center_right=False)
            psi.tensors[i], psi.tensors[i + 1] = a, b
            env.right[i] = update_right_env(env.right[i + 1], b, ws[i + 1])

        psi.center = 0
        self.last_entropies = entropies

    # -- public stepping ----------------------------------------------------

    def step(self) -> None:
        """Advance the state by one time step dt."""
        scheme = self.cfg.scheme
        if scheme == "hybrid":
            scheme = "two_site" if self.steps_done < self.cfg.grow_steps else "one_site"
        if scheme == "two_site":
            self._sweep_two_site(self.cfg.dt)
        else:
            self._sweep_one_site(self.cfg.dt)
        self.steps_done += 1

    # -- cheap observables from the maintained gauge/environments -----------

    def spin_sz(self) -> float:
        a = self.psi.tensors[0]
        sz = np.array([1.0, -1.0])
        val = np.tensordot(a.conj(), sz[None, :, None] * a, ((0, 1, 2), (0, 1, 2)))
        nrm = np.tensordot(a.conj(), a, ((0, 1, 2), (0, 1, 2)))
        return float((val / nrm).real)

    def norm(self) -> float:
        return float(np.linalg.norm(self.psi.tensors[0]))

    def energy(self) -> float:
        a = self.psi.tensors[0]
        t = np.tensordot(a, self.ws[0], (1, 2))       # [l, r, wl, su, wr]
        t = np.tensordot(t, self.env.right[0], ((1, 4), (2, 1)))  # [l, wl, su, b']
        val = np.tensordot(a.conj(), t[:, 0, :, :], ((0, 1, 2), (0, 1, 2)))
        nrm = np.tensordot(a.conj(), a, ((0, 1, 2), (0, 1, 2)))
        return float((val / nrm).real)


def tdvp_sweep(
    psi: MPS, mpo_sites: Sequence[np.ndarray], env: Environment | None, cfg: TdvpConfig
) -> tuple[MPS, Environment]:
    """One full symmetric sweep advancing ``psi`` by dt (in place)."""
    engine = TdvpEngine(psi, mpo_sites, cfg, env=env)
    engine.step()
    return engine.psi, engine.env


def evolve(
    psi0: MPS,
    mpo_sites: Sequence[np.ndarray],
    cfg: TdvpConfig,
    observables: Sequence[tuple[str, Callable[[MPS], float]]] = (),
    writer: TimeSeriesWriter | None = None,
    checkpoint_path: str | None = None,
) -> TimeSeries:
    """Evolve ``psi0`` for ceil(t_max/dt) steps, sampling observables each step.

    Rows stream to ``writer`` as they are produced. On a numerical failure the
    last healthy state is written to ``checkpoint_path`` (if given) before the
    error propagates.
    """
    psi = canonicalize(psi0.copy(), 0)
    engine = TdvpEngine(psi, mpo_sites, cfg)
    series = TimeSeries()

    def sample(t: float, wall_ms: float) -> dict[str, float]:
        row = {
            "t": t,
            "sz": engine.spin_sz(),
            "norm": engine.norm(),
            "energy": engine.energy(),
            "max_bond_entropy": max(engine.last_entropies, default=0.0),
            "wall_ms": wall_ms,
        }
        for name, fn in observables:
            row[name] = float(fn(engine.psi))
        return row

    def emit(row: dict[str, float]) -> None:
        series.append(**row)
        if writer is not None:
            writer.write_row(**row)

    emit(sample(0.0, 0.0))
    last_good = engine.psi.copy()
    for k in range(1, cfg.n_steps + 1):
        tic = time.perf_counter()
        try:
            engine.step()
            row = sample(k * cfg.dt, (time.perf_counter() - tic) * 1e3)
            if not all(math.isfinite(row[key]) for key in ("sz", "norm", "energy")):
                raise NumericalError(f"non-finite observables at t={k * cfg.dt:g}")
        except NumericalError:
            if checkpoint_path is not None:
                from .mps import save_mps

                save_mps(last_good, checkpoint_path)
                logger.error("numerical failure; last good state saved to %s", checkpoint_path)
            raise
        emit(row)
        last_good = engine.psi.copy()
    return series
