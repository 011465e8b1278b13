"""Unit tests for the parametric-source spectral model."""

import warnings

import numpy as np
import pytest

from densecoding.gaussian import combo_variance, symplectic_eigenvalues
from densecoding.nopa import (
    AboveThresholdError,
    CorrelationSpectra,
    NopaParams,
    UnachievableTargetError,
    calibrate_efficiency,
    correlation_spectra,
    epr_covariance_at,
    epr_csd,
    flat_epr_csd,
    squeezing_bound_db,
)

PAPER_FREQ = 2e6


def paper_params(**kwargs):
    defaults = dict(pump_mw=150.0, threshold_mw=175.0, linewidth_mhz=26.0)
    defaults.update(kwargs)
    return NopaParams(**defaults)


class TestNopaParams:
    def test_above_threshold_rejected(self):
        with pytest.raises(AboveThresholdError):
            NopaParams(pump_mw=200.0, threshold_mw=175.0, linewidth_mhz=26.0)
        with pytest.raises(AboveThresholdError):
            NopaParams(pump_mw=175.0, threshold_mw=175.0, linewidth_mhz=26.0)

    def test_inconsistent_finesse_warns_but_constructs(self):
        with pytest.warns(UserWarning, match="finesse"):
            NopaParams(pump_mw=1.0, threshold_mw=2.0, linewidth_mhz=26.0, finesse=500.0)

    def test_paper_finesse_is_consistent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            paper_params()

    def test_eta_range(self):
        with pytest.raises(ValueError):
            paper_params(eta_x=1.2)

    def test_sigma(self):
        assert paper_params().sigma == pytest.approx(np.sqrt(150 / 175))


class TestCorrelationSpectra:
    def test_no_output_coupling_means_no_squeezing(self):
        spec = correlation_spectra(paper_params(eta_x=0.0), np.linspace(1e5, 1e7, 50))
        assert np.allclose(spec.s_sq, 1.0)
        assert np.allclose(spec.s_anti, 1.0)

    def test_out_of_band_limit(self):
        spec = correlation_spectra(paper_params(eta_x=0.9), np.array([1e12]))
        assert spec.s_sq[0] == pytest.approx(1.0, abs=1e-6)
        assert spec.s_anti[0] == pytest.approx(1.0, abs=1e-6)

    def test_calibrated_level_at_two_megahertz(self):
        params = paper_params()
        eta = calibrate_efficiency(params, -5.4, PAPER_FREQ)
        spec = correlation_spectra(paper_params(eta_x=eta), np.array([PAPER_FREQ]))
        assert spec.s_sq[0] == pytest.approx(10**-0.54, rel=1e-9)

    def test_squeezing_monotone_in_frequency(self):
        freqs = np.linspace(0.0, 100e6, 400)
        spec = correlation_spectra(paper_params(eta_x=0.7), freqs)
        assert np.all(np.diff(spec.s_sq) >= 0)

    def test_uncertainty_product_at_every_bin(self):
        freqs = np.linspace(1e4, 5e7, 300)
        for eta in (0.1, 0.5, 0.717, 1.0):
            spec = correlation_spectra(paper_params(eta_x=eta), freqs)
            assert np.all(spec.s_sq * spec.s_anti >= 1.0 - 1e-9)

    def test_weak_pump_limit(self):
        params = NopaParams(pump_mw=1e-6, threshold_mw=175.0, linewidth_mhz=26.0, eta_x=1.0)
        spec = correlation_spectra(params, np.linspace(1e5, 1e7, 64))
        assert np.abs(spec.s_sq - 1.0).max() < 1e-2
        assert np.abs(spec.s_anti - 1.0).max() < 1e-2

    def test_quadrature_selector(self):
        params = paper_params(eta_x=0.7, eta_y=0.3)
        sx = correlation_spectra(params, np.array([PAPER_FREQ]), "x")
        sy = correlation_spectra(params, np.array([PAPER_FREQ]), "y")
        assert sy.s_sq[0] > sx.s_sq[0]

    def test_invariant_enforced_on_construction(self):
        with pytest.raises(ValueError):
            CorrelationSpectra(np.array([1.0]), np.array([0.5]), np.array([0.9]))


class TestCalibrateEfficiency:
    def test_round_trip_is_exact(self):
        params = paper_params()
        for target in (-0.5, -2.0, -5.4, -10.0, -15.0):
            eta = calibrate_efficiency(params, target, PAPER_FREQ)
            spec = correlation_spectra(paper_params(eta_x=eta), np.array([PAPER_FREQ]))
            achieved = 10 * np.log10(spec.s_sq[0])
            assert achieved == pytest.approx(target, abs=1e-6)

    def test_zero_target_needs_no_coupling(self):
        assert calibrate_efficiency(paper_params(), 0.0, PAPER_FREQ) == pytest.approx(0.0)

    def test_unachievable_target_reports_bound(self):
        params = paper_params()
        bound = squeezing_bound_db(params, PAPER_FREQ)
        assert bound == pytest.approx(-21.07, abs=0.01)
        with pytest.raises(UnachievableTargetError, match="bound"):
            calibrate_efficiency(params, -30.0, PAPER_FREQ)

    def test_positive_target_rejected(self):
        with pytest.raises(ValueError):
            calibrate_efficiency(paper_params(), 1.0, PAPER_FREQ)


class TestEprCovariance:
    def test_no_coupling_gives_vacuum(self):
        state = epr_covariance_at(paper_params(eta_x=0.0), PAPER_FREQ)
        assert np.allclose(state.cov, np.eye(4))

    def test_paper_point(self):
        eta = calibrate_efficiency(paper_params(), -5.4, PAPER_FREQ)
        state = epr_covariance_at(paper_params(eta_x=eta), PAPER_FREQ)
        assert combo_variance(state, [1, 0, 1, 0]) / 2 == pytest.approx(0.2884, abs=1e-4)
        assert combo_variance(state, [0, 1, 0, -1]) / 2 == pytest.approx(0.2884, abs=1e-4)

    def test_amplify_mirrors_combinations(self):
        eta = 0.6
        state = epr_covariance_at(paper_params(eta_x=eta, operating_mode="amplify"), PAPER_FREQ)
        assert combo_variance(state, [1, 0, -1, 0]) < 2 < combo_variance(state, [1, 0, 1, 0])

    @pytest.mark.parametrize("eta", [0.05, 0.3, 0.717, 1.0])
    @pytest.mark.parametrize("freq", [1e5, 2e6, 2e7])
    def test_always_physical(self, eta, freq):
        state = epr_covariance_at(paper_params(eta_x=eta), freq)
        assert symplectic_eigenvalues(state.cov).min() >= 1.0 - 1e-9

    def test_asymmetric_pair_is_physical(self):
        params = paper_params()
        eta_x = calibrate_efficiency(params, -5.4, PAPER_FREQ)
        eta_y = calibrate_efficiency(params, -4.8, PAPER_FREQ)
        state = epr_covariance_at(paper_params(eta_x=eta_x, eta_y=eta_y), PAPER_FREQ)
        assert combo_variance(state, [1, 0, 1, 0]) / 2 == pytest.approx(10**-0.54, rel=1e-9)
        assert combo_variance(state, [0, 1, 0, -1]) / 2 == pytest.approx(10**-0.48, rel=1e-9)

    def test_matches_csd_builder(self):
        eta = 0.5
        params = paper_params(eta_x=eta)
        state = epr_covariance_at(params, PAPER_FREQ)
        mats = epr_csd(params)(np.array([PAPER_FREQ]))
        assert np.allclose(state.cov, mats[0])


class TestFlatSource:
    def test_pure_mirror_saturates_uncertainty(self):
        s = 10**-0.54
        cov = flat_epr_csd(s, 1 / s, s, 1 / s)(np.array([0.0]))[0]
        assert symplectic_eigenvalues(cov) == pytest.approx([1.0, 1.0], abs=1e-9)

    def test_unphysical_levels_rejected(self):
        with pytest.raises(ValueError):
            flat_epr_csd(0.5, 1.0, 0.5, 1.0)  # product below the uncertainty bound

    def test_frequency_independent(self):
        csd = flat_epr_csd(0.3, 4.0, 0.3, 4.0)
        mats = csd(np.array([1e5, 2e6, 1e7]))
        assert np.allclose(mats[0], mats[1])
        assert np.allclose(mats[1], mats[2])
