"""Spin-boson MPO construction and the SVD split of each bosonic site.

MPO site tensors carry legs (w_left, sigma_up, sigma_low, w_right). The
spin-boson Hamiltonian

    H = -(delta/2) sx + c0 sz (b0 + b0^dag) + sum_n omega_n b_n^dag b_n
        + sum_n t_n (b_n^dag b_{n+1} + h.c.)

is a bond-dimension-5 MPO. Each bosonic tensor W with physical dimension
d_b = d_half^2 is reshaped to expose two half-size physical legs, viewed as
a (w_left * d_half^2) x (d_half^2 * w_right) matrix, and factorized by SVD
into two rank-4 tensors U~ (left half-site) and V~ (right half-site) with
sqrt(singular values) absorbed symmetrically into both factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chainmap import ChainCoefficients
from .errors import DimensionError, ParameterError
from .tensor import truncation_rank

__all__ = [
    "MPO",
    "SplitMPO",
    "SplitIndexMap",
    "spin_operators",
    "boson_operators",
    "build_spin_boson_mpo",
    "split_mpo_site",
    "split_full_mpo",
    "mpo_to_dense",
    "next_perfect_square",
]


def spin_operators() -> dict[str, np.ndarray]:
    """Pauli matrices and the 2x2 identity, with sz|up> = +|up>."""
    return {
        "id": np.eye(2),
        "sx": np.array([[0.0, 1.0], [1.0, 0.0]]),
        "sz": np.array([[1.0, 0.0], [0.0, -1.0]]),
    }


def boson_operators(d: int) -> dict[str, np.ndarray]:
    """Truncated ladder operators on d Fock levels: <m|b|m+1> = sqrt(m+1)."""
    if d < 2:
        raise ParameterError(f"boson dimension must be >= 2, got {d}")
    b = np.diag(np.sqrt(np.arange(1.0, d)), k=1)
    return {"id": np.eye(d), "b": b, "bdag": b.T.copy(), "n": np.diag(np.arange(float(d)))}


@dataclass
class MPO:
    """Chain of rank-4 site tensors W[w_left, s_up, s_low, w_right]."""

    sites: list[np.ndarray]
    local_dims: list[int] = field(init=False)

    def __post_init__(self) -> None:
        self.local_dims = [w.shape[1] for w in self.sites]

    @property
    def length(self) -> int:
        return len(self.sites)

    @property
    def bond_dims(self) -> list[int]:
        return [w.shape[3] for w in self.sites[:-1]]

    def to_dense(self) -> np.ndarray:
        return mpo_to_dense(self.sites)


def mpo_to_dense(sites: list[np.ndarray]) -> np.ndarray:
    """Contract the MPO chain into a dense matrix (row-major site ordering)."""
    acc = np.ones((1, 1, 1))  # [up, low, w]
    for w in sites:
        t = np.tensordot(acc, w, (2, 0))  # [up, low, u, l, w']
        t = t.transpose(0, 2, 1, 3, 4)
        acc = t.reshape(acc.shape[0] * w.shape[1], acc.shape[1] * w.shape[2], w.shape[3])
    return np.ascontiguousarray(acc[:, :, 0])


def build_spin_boson_mpo(chain: ChainCoefficients, delta: float, d_b: int) -> MPO:
    """Bond-dimension-5 MPO for the chain-mapped spin-boson Hamiltonian.

    Site 0 is the spin; site i >= 1 carries bosonic mode i-1 with d_b Fock
    levels. Hopping between modes m and m+1 enters with amplitude t[m] in the
    completion column of the tensor for mode m+1.
    """
    if d_b < 2:
        raise ParameterError(f"d_b must be >= 2, got {d_b}")
    L = chain.length
    sp = spin_operators()
    bo = boson_operators(d_b)

    w0 = np.zeros((1, 2, 2, 5))
    w0[0, :, :, 0] = sp["id"]
    w0[0, :, :, 1] = sp["sz"]
    w0[0, :, :, 4] = -(delta / 2) * sp["sx"]

    def boson_site(m: int, last: bool) -> np.ndarray:
        wr = 1 if last else 5
        w = np.zeros((5, d_b, d_b, wr))
        done = wr - 1  # completion column
        w[0, :, :, done] = chain.omega[m] * bo["n"]
        if m == 0:
            w[1, :, :, done] = chain.c0 * (bo["b"] + bo["bdag"])
        else:
            w[2, :, :, done] = chain.t[m - 1] * bo["b"]
            w[3, :, :, done] = chain.t[m - 1] * bo["bdag"]
        w[4, :, :, done] = bo["id"]
        if not last:
            w[0, :, :, 0] = bo["id"]
            w[0, :, :, 2] = bo["bdag"]
            w[0, :, :, 3] = bo["b"]
        return w

    sites = [w0] + [boson_site(m, last=(m == L - 1)) for m in range(L)]
    return MPO(sites=sites)


def next_perfect_square(n: int) -> int:
    """Smallest perfect square >= n."""
    r = math.isqrt(n)
    return n if r * r == n else (r + 1) ** 2


@dataclass(frozen=True)
class SplitIndexMap:
    """Bijection sigma = d_half*(sigma'-1) + sigma'' between one d_b-level and
    two d_half-level indices (1-based, d_b a perfect square)."""

    d_b: int

    def __post_init__(self) -> None:
        r = math.isqrt(self.d_b)
        if r * r != self.d_b:
            raise ParameterError(f"d_b={self.d_b} is not a perfect square; cannot split")

    @property
    def d_half(self) -> int:
        return math.isqrt(self.d_b)

    def split(self, sigma: int) -> tuple[int, int]:
        if not 1 <= sigma <= self.d_b:
            raise ParameterError(f"sigma={sigma} out of range 1..{self.d_b}")
        q, r = divmod(sigma - 1, self.d_half)
        return q + 1, r + 1

    def merge(self, sigma_p: int, sigma_pp: int) -> int:
        if not (1 <= sigma_p <= self.d_half and 1 <= sigma_pp <= self.d_half):
            raise ParameterError(f"({sigma_p},{sigma_pp}) out of range 1..{self.d_half}")
        return self.d_half * (sigma_p - 1) + sigma_pp


def split_mpo_site(
    w: np.ndarray, threshold: float = 0.0
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split one MPO tensor into two half-dimension tensors by SVD.

    Reshape W[wl, su, sl, wr] -> W[wl, su', su'', sl', sl'', wr], group as
    the matrix [wl su' sl' , su'' sl'' wr], SVD, keep singular values
    >= threshold * largest, and absorb sqrt(Lambda) into both factors:

        u_tilde[wl, su', sl', k],  v_tilde[k, su'', sl'', wr].

    Returns (u_tilde, v_tilde, full descending singular spectrum).
    """
    wl, du, dl, wr = w.shape
    if du != dl:
        raise DimensionError(f"physical legs must be square, got {du}x{dl}")
    dh = math.isqrt(du)
    if dh * dh != du:
        raise DimensionError(f"physical dimension {du} is not a perfect square")
    six = w.reshape(wl, dh, dh, dh, dh, wr)  # [wl, su', su'', sl', sl'', wr]
    mat = six.transpose(0, 1, 3, 2, 4, 5).reshape(wl * dh * dh, dh * dh * wr)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    keep = truncation_rank(s, None, threshold)
    sq = np.sqrt(s[:keep])
    u_tilde = (u[:, :keep] * sq).reshape(wl, dh, dh, keep)
    v_tilde = (sq[:, None] * vh[:keep]).reshape(keep, dh, dh, wr)
    return u_tilde, v_tilde, s


@dataclass
class SplitMPO:
    """Split-lattice MPO: [W_spin, U~_1, V~_1, ..., U~_L, V~_L].

    ``k_eff`` holds the retained rank of each split bond and ``spectra`` the
    full singular spectrum of each original bosonic site, both indexed by
    original MPO site (1..L).
    """

    sites: list[np.ndarray]
    k_eff: list[int]
    spectra: list[np.ndarray]
    local_dims: list[int] = field(init=False)

    def __post_init__(self) -> None:
        self.local_dims = [w.shape[1] for w in self.sites]

    @property
    def length(self) -> int:
        return len(self.sites)

    def to_dense(self) -> np.ndarray:
        return mpo_to_dense(self.sites)


def split_full_mpo(mpo: MPO, threshold: float = 0.0) -> SplitMPO:
    """Split every bosonic site of a spin-boson MPO; the spin site is kept whole."""
    sites: list[np.ndarray] = [mpo.sites[0]]
    k_eff: list[int] = []
    spectra: list[np.ndarray] = []
    for w in mpo.sites[1:]:
        u_tilde, v_tilde, s = split_mpo_site(w, threshold)
        sites.extend([u_tilde, v_tilde])
        k_eff.append(u_tilde.shape[3])
        spectra.append(s)
    return SplitMPO(sites=sites, k_eff=k_eff, spectra=spectra)
