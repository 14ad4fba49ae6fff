import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitmps.chainmap import (
    SpectralBath,
    chain_coefficients,
    spectral_density,
    write_coefficients_csv,
)
from splitmps.errors import ParameterError


class TestSpectralDensity:
    def test_ohmic_at_cutoff(self):
        bath = SpectralBath(s=1.0, alpha=0.1, omega_c=1.0)
        assert spectral_density(bath, 1.0) == pytest.approx(2 * np.pi * 0.1)

    def test_zero_above_cutoff(self):
        bath = SpectralBath(s=1.0, alpha=0.1, omega_c=1.0)
        assert spectral_density(bath, 1.5) == 0.0

    def test_zero_at_origin(self):
        bath = SpectralBath(s=0.5, alpha=0.3, omega_c=1.0)
        assert spectral_density(bath, 0.0) == 0.0

    def test_nonnegative_everywhere(self, rng):
        bath = SpectralBath(s=0.7, alpha=0.2, omega_c=2.0)
        w = np.linspace(-1, 3, 200)
        assert np.all(spectral_density(bath, w) >= 0)

    def test_parameter_validation(self):
        with pytest.raises(ParameterError):
            SpectralBath(s=0.0, alpha=0.1, omega_c=1.0)
        with pytest.raises(ParameterError):
            SpectralBath(s=1.0, alpha=-0.1, omega_c=1.0)
        with pytest.raises(ParameterError):
            SpectralBath(s=1.0, alpha=0.1, omega_c=0.0)


class TestChainCoefficients:
    def test_omega0_hand_value(self):
        # s=1, w_c=1, n=0: 0.5 * (1 + 1/3) = 2/3
        ch = chain_coefficients(SpectralBath(s=1.0, alpha=0.5, omega_c=1.0), 3)
        assert ch.omega[0] == pytest.approx(2.0 / 3.0, abs=1e-15)

    def test_c0_zero_coupling(self):
        ch = chain_coefficients(SpectralBath(s=1.0, alpha=0.0, omega_c=1.0), 2)
        assert ch.c0 == 0.0

    def test_c0_hand_value(self):
        ch = chain_coefficients(SpectralBath(s=1.0, alpha=1.0, omega_c=1.0), 2)
        assert ch.c0 == pytest.approx(0.5, abs=1e-15)

    def test_c0_squared_exact(self):
        bath = SpectralBath(s=0.5, alpha=0.3, omega_c=2.0)
        ch = chain_coefficients(bath, 2)
        assert ch.c0**2 == pytest.approx(0.3 * 4.0 / (2 * 1.5), rel=1e-14)

    def test_literature_wilson_asymptote(self):
        # at n = 10^4 the hopping approaches omega_c / 4
        ch = chain_coefficients(SpectralBath(s=1.0, alpha=0.5, omega_c=1.0), 10002, "literature")
        assert ch.t[10000] == pytest.approx(0.25, rel=1e-4)

    def test_omega_monotone_to_half_cutoff(self):
        for s in (0.5, 1.0, 1.9):
            ch = chain_coefficients(SpectralBath(s=s, alpha=0.2, omega_c=1.0), 200)
            assert np.all(np.diff(ch.omega) < 0)
            assert ch.omega[-1] == pytest.approx(0.5, abs=1e-3)
            assert np.all(ch.omega > 0) and np.all(ch.t > 0)

    def test_variants_agree_only_at_first_hopping(self):
        bath = SpectralBath(s=1.0, alpha=0.5, omega_c=1.0)
        paper = chain_coefficients(bath, 50, "paper")
        lit = chain_coefficients(bath, 50, "literature")
        assert paper.t[0] == pytest.approx(lit.t[0], rel=1e-15)
        assert np.all(np.abs(paper.t[1:] - lit.t[1:]) > 1e-6)

    def test_parameter_errors(self):
        bath = SpectralBath(s=1.0, alpha=0.5, omega_c=1.0)
        with pytest.raises(ParameterError):
            chain_coefficients(bath, 0)
        with pytest.raises(ParameterError):
            chain_coefficients(bath, 3, "unknown")

    @given(s=st.floats(0.2, 2.0), alpha=st.floats(0.0, 2.0))
    @settings(max_examples=25, deadline=None)
    def test_positivity(self, s, alpha):
        ch = chain_coefficients(SpectralBath(s=s, alpha=alpha, omega_c=1.0), 20, "literature")
        assert np.all(ch.omega > 0) and np.all(ch.t > 0) and ch.c0 >= 0


class TestAgainstTridiagonalizationOracle:
    """Independent check: Lanczos-tridiagonalize a finely discretized bath.

    The chain coefficients are the Jacobi (three-term recurrence) matrix of
    the measure J(w)/pi; the 'literature' t_n variant reproduces it.
    """

    @pytest.mark.parametrize("s", [0.5, 1.0])
    def test_literature_variant_matches_discretized_bath(self, s):
        bath = SpectralBath(s=s, alpha=0.4, omega_c=1.0)
        nodes, weights = np.polynomial.legendre.leggauss(4000)
        w = 0.5 * (nodes + 1)  # map to [0, 1]
        lam2 = spectral_density(bath, w) * (0.5 * weights) / np.pi
        v = np.sqrt(lam2)
        assert 0.5 * np.linalg.norm(v) == pytest.approx(
            chain_coefficients(bath, 2).c0, rel=1e-12
        )
        n_chain = 10
        alphas, betas = [], []
        basis = [v / np.linalg.norm(v)]
        for n in range(n_chain):
            r = w * basis[n]
            alphas.append(float(basis[n] @ r))
            for b in basis:  # full reorthogonalization
                r = r - (b @ r) * b
            for b in basis:
                r = r - (b @ r) * b
            beta = np.linalg.norm(r)
            betas.append(float(beta))
            basis.append(r / beta)
        ch = chain_coefficients(bath, n_chain + 1, "literature")
        np.testing.assert_allclose(alphas, ch.omega[:n_chain], rtol=1e-8)
        np.testing.assert_allclose(betas[:-1], ch.t[: n_chain - 1], rtol=1e-8)

    def test_paper_variant_deviates_from_oracle_asymptote(self):
        # the printed denominator gives t_n -> omega_c/6, not omega_c/4
        ch = chain_coefficients(SpectralBath(s=1.0, alpha=0.4, omega_c=1.0), 10002, "paper")
        assert ch.t[10000] == pytest.approx(1.0 / 6.0, rel=1e-3)


def test_coefficients_csv_roundtrip(tmp_path):
    ch = chain_coefficients(SpectralBath(s=1.0, alpha=0.5, omega_c=1.0), 4)
    path = tmp_path / "coeffs.csv"
    write_coefficients_csv(ch, path, header_lines=["case = test"])
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "# case = test"
    assert lines[1] == "n,omega_n,t_n"
    assert len(lines) == 2 + 4
    n, omega0, t0 = lines[2].split(",")
    assert int(n) == 0
    assert float(omega0) == ch.omega[0]
    assert float(t0) == ch.t[0]
    assert lines[-1].endswith(",")  # final mode has no outgoing hopping
