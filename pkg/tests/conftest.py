import numpy as np
import pytest

from splitmps.mps import MPS, canonicalize


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def random_mps(local_dims, chi, rng, normalized=True):
    """Random complex MPS with bond dimensions capped at chi."""
    n = len(local_dims)
    bonds = [1]
    for i in range(n - 1):
        left = bonds[-1] * local_dims[i]
        right = int(np.prod(local_dims[i + 1:]))
        bonds.append(min(chi, left, right))
    bonds.append(1)
    tensors = []
    for i, d in enumerate(local_dims):
        shape = (bonds[i], d, bonds[i + 1])
        tensors.append(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    psi = MPS(tensors=tensors)
    canonicalize(psi, 0)
    if normalized:
        psi.normalize()
    return psi


def random_hermitian(n, rng):
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (m + m.conj().T) / 2
