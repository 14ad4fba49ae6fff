"""Matrix product states on the split lattice: gauges, observables, serialization.

Site tensors carry legs (chi_left, sigma, chi_right). The split lattice keeps
the spin whole at site 0 and represents each bosonic mode by two consecutive
half-dimension sites, so a Fock level l occupies the pair of local states
divmod(l, d_half).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError, ParameterError

__all__ = [
    "MPS",
    "mps_from_dense",
    "product_state",
    "spin_boson_product_state",
    "canonicalize",
    "expect_local",
    "expect_boson_number",
    "bond_entropy",
    "all_bond_entropies",
    "schmidt_values",
    "entropy_from_schmidt",
    "overlap",
    "pad_bonds",
    "save_mps",
    "load_mps",
]

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT_VERSION = 1


@dataclass
class MPS:
    """List of rank-3 tensors A[chi_left, sigma, chi_right]; boundary bonds have extent 1.

    ``center`` is the orthogonality-center index, or None when the gauge is
    unknown. Tensors left of the center are left-isometric, tensors right of
    it right-isometric.
    """

    tensors: list[np.ndarray]
    center: int | None = None
    local_dims: list[int] = field(init=False)

    def __post_init__(self) -> None:
        self.local_dims = [a.shape[1] for a in self.tensors]

    @property
    def length(self) -> int:
        return len(self.tensors)

    @property
    def bond_dims(self) -> list[int]:
        return [a.shape[2] for a in self.tensors[:-1]]

    def max_bond(self) -> int:
        return max(self.bond_dims, default=1)

    def copy(self) -> "MPS":
        return MPS(tensors=[a.copy() for a in self.tensors], center=self.center)

    def norm(self) -> float:
        if self.center is not None:
            return float(np.linalg.norm(self.tensors[self.center]))
        return float(np.sqrt(abs(overlap(self, self))))

    def normalize(self) -> "MPS":
        n = self.norm()
        if n == 0:
            raise DimensionError("cannot normalize a zero state")
        if self.center is not None:
            self.tensors[self.center] = self.tensors[self.center] / n
        else:
            self.tensors[0] = self.tensors[0] / n
        return self

    def to_dense(self) -> np.ndarray:
        """Contract to a state vector; intended for small oracle instances."""
        acc = np.ones((1, 1), dtype=complex)
        for a in self.tensors:
            acc = np.tensordot(acc, a, (1, 0))  # [prod, s, r]
            acc = acc.reshape(acc.shape[0] * a.shape[1], a.shape[2])
        return acc[:, 0]


def mps_from_dense(vec: np.ndarray, local_dims: list[int], max_bond: int | None = None) -> MPS:
    """Exact (or bond-capped) MPS factorization of a dense state vector."""
    dim = int(np.prod(local_dims))
    if vec.size != dim:
        raise DimensionError(f"vector of size {vec.size} does not match dims {local_dims}")
    rest = np.asarray(vec, dtype=complex).reshape(1, dim)
    tensors: list[np.ndarray] = []
    for d in local_dims[:-1]:
        chi_l = rest.shape[0]
        m = rest.reshape(chi_l * d, -1)
        u, s, vh = np.linalg.svd(m, full_matrices=False)
        keep = int(np.count_nonzero(s > 1e-14 * s[0])) if s[0] > 0 else 1
        if max_bond is not None:
            keep = min(keep, max_bond)
        tensors.append(u[:, :keep].reshape(chi_l, d, keep))
        rest = s[:keep, None] * vh[:keep]
    tensors.append(rest.reshape(rest.shape[0], local_dims[-1], 1))
    return MPS(tensors=tensors, center=len(local_dims) - 1)


def product_state(local_states: list[np.ndarray]) -> MPS:
    """Bond-dimension-1 MPS from per-site state vectors (normalized with a warning)."""
    tensors = []
    for i, vec in enumerate(local_states):
        v = np.asarray(vec, dtype=complex).reshape(-1)
        n = np.linalg.norm(v)
        if n == 0:
            raise ParameterError(f"local state at site {i} is zero")
        if abs(n - 1.0) > 1e-12:
            logger.warning("normalizing local state at site %d (norm %.3g)", i, n)
            v = v / n
        tensors.append(v.reshape(1, len(v), 1))
    return MPS(tensors=tensors, center=0)


def spin_boson_product_state(
    length: int,
    d_b: int,
    split: bool = True,
    spin_state: np.ndarray | None = None,
    boson_levels: list[int] | None = None,
) -> MPS:
    """Initial spin (x) Fock-level product state on the split or original lattice.

    Defaults to spin up and all modes in vacuum. On the split lattice a level
    l maps to the pair divmod(l, d_half).
    """
    spin = np.array([1.0, 0.0]) if spin_state is None else np.asarray(spin_state, dtype=complex)
    levels = [0] * length if boson_levels is None else list(boson_levels)
    if len(levels) != length:
        raise ParameterError(f"expected {length} boson levels, got {len(levels)}")
    states: list[np.ndarray] = [spin]
    if split:
        dh = math.isqrt(d_b)
        if dh * dh != d_b:
            raise ParameterError(f"d_b={d_b} is not a perfect square; cannot use split lattice")
        for lev in levels:
            if not 0 <= lev < d_b:
                raise ParameterError(f"boson level {lev} outside 0..{d_b - 1}")
            hi, lo = divmod(lev, dh)
            states.append(np.eye(dh)[hi])
            states.append(np.eye(dh)[lo])
    else:
        for lev in levels:
            if not 0 <= lev < d_b:
                raise ParameterError(f"boson level {lev} outside 0..{d_b - 1}")
            states.append(np.eye(d_b)[lev])
    return product_state(states)


def _left_orthogonalize_site(psi: MPS, i: int) -> None:
    a = psi.tensors[i]
    l, s, r = a.shape
    q, rmat = np.linalg.qr(a.reshape(l * s, r))
    psi.tensors[i] = q.reshape(l, s, q.shape[1])
    psi.tensors[i + 1] = np.tensordot(rmat, psi.tensors[i + 1], (1, 0))


def _right_orthogonalize_site(psi: MPS, i: int) -> None:
    a = psi.tensors[i]
    l, s, r = a.shape
    q, rmat = np.linalg.qr(a.reshape(l, s * r).conj().T)
    k = q.shape[1]
    psi.tensors[i] = q.conj().T.reshape(k, s, r)
    psi.tensors[i - 1] = np.tensordot(psi.tensors[i - 1], rmat.conj().T, (2, 0))


def canonicalize(psi: MPS, center: int) -> MPS:
    """Bring ``psi`` into mixed-canonical form around ``center`` (in place)."""
    if not 0 <= center < psi.length:
        raise ParameterError(f"center {center} outside chain of length {psi.length}")
    start_left = 0 if psi.center is None else min(psi.center, center)
    start_right = psi.length - 1 if psi.center is None else max(psi.center, center)
    for i in range(start_left, center):
        _left_orthogonalize_site(psi, i)
    for i in range(start_right, center, -1):
        _right_orthogonalize_site(psi, i)
    psi.center = center
    return psi


def overlap(bra: MPS, ket: MPS) -> complex:
    """<bra|ket> by transfer contraction."""
    if bra.local_dims != ket.local_dims:
        raise DimensionError("states live on different lattices")
    env = np.ones((1, 1), dtype=complex)  # [bra_bond, ket_bond]
    for a_bra, a_ket in zip(bra.tensors, ket.tensors):
        t = np.tensordot(env, a_ket, (1, 0))  # [bra, s, r_ket]
        env = np.tensordot(a_bra.conj(), t, ((0, 1), (0, 1)))  # [r_bra, r_ket]
    return complex(env[0, 0])


def expect_local(psi: MPS, op: np.ndarray, site: int) -> complex:
    """<psi| O_site |psi> / <psi|psi>."""
    if op.shape != (psi.local_dims[site], psi.local_dims[site]):
        raise DimensionError(
            f"operator shape {op.shape} does not match local dimension {psi.local_dims[site]}"
        )
    work = psi if psi.center == site else canonicalize(psi.copy(), site)
    a = work.tensors[site]
    t = np.tensordot(op, a, (1, 1))  # [su, l, r]
    val = np.tensordot(a.conj(), t, ((1, 0, 2), (0, 1, 2)))
    nrm = np.tensordot(a.conj(), a, ((0, 1, 2), (0, 1, 2)))
    return complex(val / nrm)


def expect_boson_number(psi: MPS, original_site: int, split: bool = True) -> float:
    """Occupation <b^dag b> of an original bosonic mode.

    On the split lattice the number operator acts on the site pair as
    n = d_half * n' (x) 1 + 1 (x) n'', so the expectation is a sum of two
    single-site expectations.
    """
    if split:
        n_modes = (psi.length - 1) // 2
        if not 0 <= original_site < n_modes:
            raise ParameterError(f"site {original_site} outside 0..{n_modes - 1}")
        hi, lo = 1 + 2 * original_site, 2 + 2 * original_site
        dh = psi.local_dims[hi]
        n_op = np.diag(np.arange(float(dh)))
        return float(
            dh * expect_local(psi, n_op, hi).real + expect_local(psi, n_op, lo).real
        )
    n_modes = psi.length - 1
    if not 0 <= original_site < n_modes:
        raise ParameterError(f"site {original_site} outside 0..{n_modes - 1}")
    d = psi.local_dims[original_site + 1]
    return float(expect_local(psi, np.diag(np.arange(float(d))), original_site + 1).real)


def schmidt_values(psi: MPS, bond: int) -> np.ndarray:
    """Schmidt coefficients across the bond between sites ``bond`` and ``bond+1``."""
    if not 0 <= bond < psi.length - 1:
        raise ParameterError(f"bond {bond} outside 0..{psi.length - 2}")
    work = canonicalize(psi.copy(), bond)
    a = work.tensors[bond]
    l, s, r = a.shape
    return np.linalg.svd(a.reshape(l * s, r), compute_uv=False)


def entropy_from_schmidt(s: np.ndarray) -> float:
    p = s**2
    total = p.sum()
    if total == 0:
        return 0.0
    p = p / total
    p = p[p > 1e-30]
    return float(max(0.0, -np.sum(p * np.log(p))))


def bond_entropy(psi: MPS, bond: int) -> float:
    """Von Neumann entropy of the Schmidt spectrum at a bond (natural log)."""
    return entropy_from_schmidt(schmidt_values(psi, bond))


def all_bond_entropies(psi: MPS) -> list[float]:
    """Entropies at every bond from a single left-to-right SVD sweep."""
    work = canonicalize(psi.copy(), 0)
    ents: list[float] = []
    for i in range(work.length - 1):
        a = work.tensors[i]
        l, s, r = a.shape
        u, sv, vh = np.linalg.svd(a.reshape(l * s, r), full_matrices=False)
        ents.append(entropy_from_schmidt(sv))
        work.tensors[i] = u.reshape(l, s, u.shape[1])
        work.tensors[i + 1] = np.tensordot(sv[:, None] * vh, work.tensors[i + 1], (1, 0))
    return ents


def pad_bonds(psi: MPS, chi: int, rng: np.random.Generator, eps: float = 1e-8) -> MPS:
    """Enlarge internal bonds to ``chi`` with eps-scale random entries (in place).

    A perturbative start lets fixed-rank one-site sweeps explore the full
    bond space; the state changes by O(eps) and is renormalized.
    """
    for i in range(psi.length - 1):
        a, b = psi.tensors[i], psi.tensors[i + 1]
        r = a.shape[2]
        if r >= chi:
            continue
        scale = eps * max(np.linalg.norm(a), 1.0)
        grow_a = scale * (
            rng.standard_normal((a.shape[0], a.shape[1], chi - r))
            + 1j * rng.standard_normal((a.shape[0], a.shape[1], chi - r))
        )
        grow_b = scale * (
            rng.standard_normal((chi - r, b.shape[1], b.shape[2]))
            + 1j * rng.standard_normal((chi - r, b.shape[1], b.shape[2]))
        )
        psi.tensors[i] = np.concatenate([a, grow_a], axis=2)
        psi.tensors[i + 1] = np.concatenate([b, grow_b], axis=0)
    psi.center = None
    canonicalize(psi, 0)
    psi.normalize()
    return psi


def save_mps(psi: MPS, path: str | Path) -> None:
    """Versioned checkpoint: bond/physical dims plus complex tensor data."""
    arrays = {f"tensor_{i}": a for i, a in enumerate(psi.tensors)}
    np.savez(
        path,
        format_version=CHECKPOINT_FORMAT_VERSION,
        n_sites=psi.length,
        center=-1 if psi.center is None else psi.center,
        **arrays,
    )


def load_mps(path: str | Path) -> MPS:
    with np.load(path) as data:
        version = int(data["format_version"])
        if version != CHECKPOINT_FORMAT_VERSION:
            raise ParameterError(f"unsupported checkpoint format version {version}")
        n = int(data["n_sites"])
        center = int(data["center"])
        tensors = [np.asarray(data[f"tensor_{i}"], dtype=complex) for i in range(n)]
    return MPS(tensors=tensors, center=None if center < 0 else center)
