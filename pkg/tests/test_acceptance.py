"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one PASS line with the obtained numbers so a full run
doubles as the verification report.  The scenario runs use the default
configuration at 2^22 samples.
"""

import time

import numpy as np
import pytest

from densecoding.engine import (
    electronics_correct,
    estimate_psd,
    synthesize_traces,
    unit_csd,
    welch_psd,
)
from densecoding.gaussian import (
    LossChannel,
    apply_loss,
    apply_symplectic,
    symplectic_eigenvalues,
    symplectic_form,
    two_mode_squeezed_state,
    vacuum_state,
)
from densecoding.metrics import VariancePair, teleport_fidelity, variance_product
from densecoding.nopa import flat_epr_csd
from densecoding.scenarios import (
    fig2_config,
    fig3_config,
    fig4_config,
    pure_state_config,
    run_fig2,
    run_fig3,
    run_fig4,
    sweep,
)

N_SAMPLES = 2**22
FS = 50e6
R_REF = 0.54 * np.log(10.0) / 2.0


def report(criterion: str, detail: str) -> None:
    print(f"\nACCEPTANCE {criterion}: PASS  [{detail}]")


@pytest.fixture(scope="module")
def fig2_doc():
    cfg = fig2_config().with_overrides({"engine.samples": N_SAMPLES})
    start = time.perf_counter()
    doc = run_fig2(cfg)
    doc.metrics["_runtime_s"] = time.perf_counter() - start
    return doc


@pytest.fixture(scope="module")
def fig3_doc():
    return run_fig3(fig3_config().with_overrides({"engine.samples": N_SAMPLES}))


@pytest.fixture(scope="module")
def fig4_doc():
    return run_fig4(fig4_config().with_overrides({"engine.samples": N_SAMPLES}))


@pytest.fixture(scope="module")
def fig4_pure_doc():
    return run_fig4(pure_state_config().with_overrides({"engine.samples": N_SAMPLES}))


class TestCriterion1Fig2:
    def test_correlation_floors(self, fig2_doc):
        m = fig2_doc.metrics
        for name in ("sum", "difference"):
            assert m[f"floor_{name}_db_measured"] == pytest.approx(-4.0, abs=0.3)
            assert m[f"floor_{name}_db_corrected"] == pytest.approx(-5.4, abs=0.3)
        report(
            "1 (correlation spectra)",
            f"measured {m['floor_sum_db_measured']:+.2f}/{m['floor_difference_db_measured']:+.2f} dB, "
            f"corrected {m['floor_sum_db_corrected']:+.2f}/{m['floor_difference_db_corrected']:+.2f} dB",
        )

    def test_runtime_budget(self, fig2_doc):
        runtime = fig2_doc.metrics["_runtime_s"]
        assert runtime < 60.0
        report("1 (runtime)", f"{runtime:.1f} s for 2^22 samples (budget 60 s)")


class TestCriterion2Fig3:
    def test_snr_improvements(self, fig3_doc):
        m = fig3_doc.metrics
        assert m["improvement_sum_db_measured"] == pytest.approx(4.0, abs=0.3)
        assert m["improvement_difference_db_measured"] == pytest.approx(3.6, abs=0.3)
        assert m["improvement_sum_db_corrected"] == pytest.approx(5.4, abs=0.3)
        assert m["improvement_difference_db_corrected"] == pytest.approx(4.8, abs=0.3)
        report(
            "2 (dense-coding SNR gains)",
            f"measured +{m['improvement_sum_db_measured']:.2f}/+{m['improvement_difference_db_measured']:.2f} dB, "
            f"corrected +{m['improvement_sum_db_corrected']:.2f}/+{m['improvement_difference_db_corrected']:.2f} dB",
        )

    def test_both_channels_from_one_sample_set(self, fig3_doc):
        # simultaneity: both floors sub-SNL out of the same trace
        m = fig3_doc.metrics
        assert m["floor_sum_db_measured"] < 0.0
        assert m["floor_difference_db_measured"] < 0.0


class TestCriterion3Fig4:
    def test_eve_floor(self, fig4_doc):
        m = fig4_doc.metrics
        assert m["eve_floor_db_measured"] == pytest.approx(4.0, abs=0.5)
        report(
            "3 (interception floor)",
            f"Eve floor {m['eve_floor_db_measured']:+.2f} dB re SNL (-5 dB electronics)",
        )

    def test_bob_eve_gap_matches_pure_state_ratio(self, fig4_pure_doc):
        m = fig4_pure_doc.metrics
        expected = 10 * np.log10((np.exp(4 * R_REF) + 1) / 4)
        assert m["bob_minus_eve_snr_db"] == pytest.approx(expected, abs=0.5)
        report(
            "3 (Bob/Eve SNR ratio)",
            f"gap {m['bob_minus_eve_snr_db']:.2f} dB vs analytic {expected:.2f} dB",
        )


class TestCriterion4ElectronicsCorrection:
    def test_reference_pairs(self):
        a = electronics_correct(-4.0, -8.0)
        b = electronics_correct(-3.6, -8.0)
        assert a == pytest.approx(-5.45, abs=0.05)
        assert b == pytest.approx(-4.81, abs=0.05)
        report("4 (electronics correction)", f"(-4.0,-8) -> {a:.3f} dB, (-3.6,-8) -> {b:.3f} dB")


class TestCriterion5Metrics:
    def test_fidelities_and_variance_product(self):
        f_measured = teleport_fidelity(VariancePair(10**-0.40, 10**-0.36))
        f_corrected = teleport_fidelity(VariancePair(10**-0.54, 10**-0.54))
        product = variance_product(VariancePair(10**-0.54, 10**-0.54))
        assert f_measured == pytest.approx(0.71, abs=0.01)
        assert f_corrected == pytest.approx(0.78, abs=0.02)
        assert product == pytest.approx(0.332, abs=0.005)
        report(
            "5 (figures of merit)",
            f"F_measured {f_measured:.3f}, F_corrected {f_corrected:.3f}, product {product:.4f}",
        )


class TestCriterion6Properties:
    def test_symplectic_identity_1000_transforms(self):
        from test_gaussian import random_symplectic

        gen = np.random.default_rng(60)
        omega = symplectic_form(2)
        worst = 0.0
        for _ in range(1000):
            s = random_symplectic(gen, 2).matrix
            worst = max(worst, np.abs(s @ omega @ s.T - omega).max())
        assert worst < 1e-10
        report("6 (symplectic identity)", f"worst defect {worst:.2e} over 1000 transforms")

    def test_physicality_preserved_by_channels(self):
        from test_gaussian import random_symplectic

        gen = np.random.default_rng(61)
        worst = np.inf
        for _ in range(1000):
            state = apply_symplectic(vacuum_state(2), random_symplectic(gen, 2))
            state = apply_loss(state, LossChannel(int(gen.integers(2)), float(gen.uniform())))
            worst = min(worst, symplectic_eigenvalues(state.cov).min())
        assert worst >= 1.0 - 1e-9
        report("6 (physicality)", f"smallest symplectic eigenvalue {worst:.12f}")

    def test_monte_carlo_covariance_within_3_sigma(self):
        n = 10**6
        s = 10**-0.54
        csd = flat_epr_csd(s, 1 / s, s, 1 / s)
        target = csd(np.array([0.0]))[0]
        trace = synthesize_traces(csd, n / FS, FS, seed=62)
        data = np.vstack([trace.channels[c] for c in ("x1", "y1", "x2", "y2")])
        sample = data @ data.T / data.shape[1]
        sigma = np.sqrt((np.outer(np.diag(target), np.diag(target)) + target**2) / data.shape[1])
        pulls = np.abs(sample - target) / sigma
        assert pulls.max() <= 3.0
        report("6 (MC covariance)", f"max pull {pulls.max():.2f} sigma at N=1e6")

    def test_parseval(self):
        trace = synthesize_traces(unit_csd(4), 2**20 / FS, FS, seed=63)
        x = trace.channels["x1"]
        freq, psd, _, _ = welch_psd(x, FS, rbw_hz=30e3)
        integrated = np.trapezoid(psd, freq)
        ratio = integrated / np.var(x)
        assert ratio == pytest.approx(1.0, abs=0.01)
        report("6 (Parseval)", f"integrated/time-domain power = {ratio:.4f}")

    def test_bit_exact_determinism_across_workers(self):
        kwargs = dict(duration_s=2**19 / FS, sample_rate_hz=FS, seed=64)
        reference = synthesize_traces(unit_csd(4), workers=1, **kwargs)
        for workers in (2, 8):
            other = synthesize_traces(unit_csd(4), workers=workers, **kwargs)
            for name in reference.channels:
                assert np.array_equal(reference.channels[name], other.channels[name])
        report("6 (determinism)", "bit-identical traces for 1, 2, and 8 workers")


class TestCriterion7Security:
    def test_tap_sweep_monotonicity(self):
        doc = sweep(pure_state_config(), "tap_T", 1.0, 0.0, points=21)
        assert doc.checks["bob_snr_strictly_decreasing"]
        assert doc.checks["bob_floor_strictly_increasing"]
        report(
            "7 (tap monotonicity)",
            "Bob SNR strictly decreasing and floor strictly rising over 21 tap points",
        )

    def test_advantage_crossover_location(self):
        doc = sweep(pure_state_config(), "r_db", 1.0, 4.0, points=121)
        crossover = doc.checks["advantage_crossover_r_db"]
        assert crossover == pytest.approx(2.39, abs=0.2)
        report("7 (crossover)", f"Bob/Eve crossover at {crossover:.3f} dB squeezing (analytic 2.386)")
