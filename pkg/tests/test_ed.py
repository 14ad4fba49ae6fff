import numpy as np
import pytest

from splitmps.chainmap import ChainCoefficients, SpectralBath, chain_coefficients
from splitmps.ed import build_dense, evolve_dense, sigma_z_diag, spin_up_vacuum
from splitmps.errors import ParameterError
from splitmps.mpo import build_spin_boson_mpo


@pytest.fixture
def bath():
    return SpectralBath(s=1.0, alpha=0.3, omega_c=1.0)


class TestBuildDense:
    def test_hand_construction_single_boson(self, bath):
        ch = chain_coefficients(bath, 1, "literature")
        h = build_dense(ch, 0.1, 2).matrix
        w0, c0 = ch.omega[0], ch.c0
        expected = np.array(
            [
                [0.0, c0, -0.05, 0.0],
                [c0, w0, 0.0, -0.05],
                [-0.05, 0.0, 0.0, -c0],
                [0.0, -0.05, -c0, w0],
            ]
        )
        np.testing.assert_allclose(h, expected, atol=1e-14)

    def test_diagonal_when_decoupled(self):
        ch = ChainCoefficients(
            omega=np.array([0.5, 0.7]), t=np.zeros(1), c0=0.0, length=2, tn_variant="paper"
        )
        h = build_dense(ch, 0.0, 3).matrix
        np.testing.assert_allclose(h, np.diag(np.diag(h)), atol=1e-14)

    def test_hermitian_real_eigenvalues(self, bath):
        ch = chain_coefficients(bath, 2, "literature")
        h = build_dense(ch, 0.1, 4).matrix
        np.testing.assert_allclose(h, h.conj().T, atol=1e-12)
        assert np.all(np.isreal(np.linalg.eigvalsh(h)))

    def test_matches_mpo_contraction(self, bath):
        ch = chain_coefficients(bath, 3, "paper")
        h = build_dense(ch, 0.2, 3).matrix
        np.testing.assert_allclose(build_spin_boson_mpo(ch, 0.2, 3).to_dense(), h, atol=1e-12)

    def test_cap_exceeded(self, bath):
        ch = chain_coefficients(bath, 4, "literature")
        with pytest.raises(ParameterError):
            build_dense(ch, 0.1, 16, dim_cap=4096)


class TestEvolveDense:
    def test_free_spin_cosine(self):
        bath = SpectralBath(s=1.0, alpha=0.0, omega_c=1.0)
        ch = chain_coefficients(bath, 1, "literature")
        h = build_dense(ch, 0.1, 2)
        series = evolve_dense(h, spin_up_vacuum(2, 1), dt=0.1, t_max=20.0)
        t = np.array(series.t)
        np.testing.assert_allclose(series.sz, np.cos(0.1 * t), atol=1e-10)

    def test_sz_conserved_at_zero_delta(self, bath):
        ch = chain_coefficients(bath, 2, "literature")
        h = build_dense(ch, 0.0, 3)
        series = evolve_dense(h, spin_up_vacuum(3, 2), dt=0.1, t_max=5.0)
        np.testing.assert_allclose(series.sz, 1.0, atol=1e-12)

    def test_norm_and_energy_conserved(self, bath):
        ch = chain_coefficients(bath, 2, "literature")
        h = build_dense(ch, 0.1, 4)
        series = evolve_dense(h, spin_up_vacuum(4, 2), dt=0.05, t_max=5.0)
        np.testing.assert_allclose(series.norm, 1.0, atol=1e-10)
        assert abs(series.energy[-1] - series.energy[0]) < 1e-10

    def test_first_row_is_initial_state(self, bath):
        ch = chain_coefficients(bath, 1, "literature")
        h = build_dense(ch, 0.1, 4)
        series = evolve_dense(h, spin_up_vacuum(4, 1), dt=0.1, t_max=1.0)
        assert series.t[0] == 0.0 and series.sz[0] == pytest.approx(1.0)

    def test_eig_and_krylov_paths_agree(self, bath):
        # dim 32 runs the eigendecomposition path; force the sparse stepping
        # path by shrinking the crossover and compare the two integrators
        import splitmps.ed as ed

        ch = chain_coefficients(bath, 2, "literature")
        h = build_dense(ch, 0.1, 4)
        a = evolve_dense(h, spin_up_vacuum(4, 2), dt=0.1, t_max=3.0)
        saved = ed.EIG_PATH_MAX_DIM
        try:
            ed.EIG_PATH_MAX_DIM = 1
            b = evolve_dense(h, spin_up_vacuum(4, 2), dt=0.1, t_max=3.0)
        finally:
            ed.EIG_PATH_MAX_DIM = saved
        np.testing.assert_allclose(a.sz, b.sz, atol=1e-10)


def test_sigma_z_diag_pattern():
    d = sigma_z_diag(2, 1)
    np.testing.assert_array_equal(d, [1, 1, -1, -1])
