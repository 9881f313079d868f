"""Per-degree multiplier extraction and classification of equivariant kinds."""

import numpy as np
import pytest

from fuzzysphere.equivariant import (
    EquivariantQuantization,
    classify_to_t,
    equivariance_residual,
    extract_multipliers,
    fit_mu,
    legendre_identity_check,
    read_multipliers_csv,
    spectral_quantizer,
    write_multipliers_csv,
)
from fuzzysphere.sphere_fn import constant, harmonic
from fuzzysphere.smearing import (
    heat_quantizer,
    metaplectic_quantizer,
    vector_twist_quantizer,
)


def synthetic_extraction(k, t, gamma, lmax=6):
    ls = np.arange(lmax + 1)
    mults = 1.0 - 2.0 * ls * (ls + 1) * t / k + gamma * (ls * (ls + 1)) ** 2 / k**2
    return EquivariantQuantization(
        k=k, multipliers=mults, schur_residuals=np.zeros(lmax + 1)
    )


class TestExtraction:
    def test_standard_multipliers_are_one(self, quantizer_cache):
        ext = extract_multipliers(quantizer_cache(8))
        assert np.abs(ext.multipliers - 1.0).max() < 1e-12
        assert np.abs(ext.schur_residuals).max() < 1e-10

    def test_heat_multipliers_closed_form(self, quantizer_cache):
        t = 0.2
        k = 16
        ext = extract_multipliers(heat_quantizer(quantizer_cache(k), t))
        ls = np.arange(ext.lmax + 1)
        expect = np.exp(-2.0 * ls * (ls + 1) * t / k)
        assert np.abs(ext.multipliers - expect).max() < 1e-12

    def test_metaplectic_multipliers_closed_form(self, quantizer_cache):
        k = 16
        ext = extract_multipliers(metaplectic_quantizer(quantizer_cache(k)))
        ls = np.arange(ext.lmax + 1)
        expect = 1.0 + ls * (ls + 1) / (2.0 * k)
        assert np.abs(ext.multipliers - expect).max() < 1e-12

    def test_full_multiplet_scan(self, quantizer_cache):
        ext = extract_multipliers(
            heat_quantizer(quantizer_cache(8), 0.3), residual_m="all"
        )
        assert np.abs(ext.schur_residuals).max() < 1e-8

    def test_alphas_are_multiplier_offsets(self):
        e = synthetic_extraction(16, 0.1, 0.3)
        assert np.abs(e.alphas - (e.multipliers - 1.0)).max() == 0.0

    def test_unitality_enforced(self):
        with pytest.raises(ValueError):
            EquivariantQuantization(
                k=8, multipliers=np.array([1.1, 0.9]), schur_residuals=np.zeros(2)
            )

    def test_band_range_guard(self, quantizer_cache):
        q = quantizer_cache(8)
        with pytest.raises(ValueError):
            extract_multipliers(q, lmax=q.band_max + 1)

    def test_non_equivariant_rejected(self, quantizer_cache):
        # a gradient twist is a genuine POVM but breaks rotation covariance
        q = vector_twist_quantizer(
            quantizer_cache(8), (0.0, 0.0, 0.0), potential=0.3 * harmonic(2, 1)
        )
        assert equivariance_residual(q) > 1e-4
        with pytest.raises(ValueError):
            extract_multipliers(q)

    def test_rotation_twist_is_not_equivariant(self, quantizer_cache):
        # a fixed twist axis is conjugated by group elements, so even the
        # rotation flavor fails full covariance and is refused
        q = vector_twist_quantizer(quantizer_cache(8), (0.0, 0.0, 0.7))
        assert equivariance_residual(q) > 1e-4
        with pytest.raises(ValueError):
            extract_multipliers(q)


class TestSpectralQuantizer:
    def test_multiplier_round_trip(self, quantizer_cache):
        fn = lambda l: 1.0 / (1.0 + 0.1 * l)
        q = spectral_quantizer(quantizer_cache(8), fn)
        ext = extract_multipliers(q)
        expect = np.array([fn(l) for l in range(ext.lmax + 1)])
        assert np.abs(ext.multipliers - expect).max() < 1e-11

    def test_unital(self, quantizer_cache):
        q = spectral_quantizer(quantizer_cache(8), lambda l: 0.5 if l else 1.0)
        assert np.abs(q.quantize(constant(1.0)) - np.eye(9)).max() < 1e-12


class TestFitMu:
    def test_synthetic_two_level_fit_is_exact(self):
        # the curvature term is exactly 1/k^2, so two-point extrapolation
        # recovers mu = 1 + 4t with no bias at all
        t, gamma = 0.1, 0.3
        exts = [synthetic_extraction(k, t, gamma) for k in (32, 64)]
        report = fit_mu(exts)
        assert report.mu == pytest.approx(1.0 + 4 * t, abs=1e-12)
        assert report.t == pytest.approx(t, abs=1e-12)
        assert report.verdict == "POVM-compatible"

    def test_synthetic_negative_t_flags_non_povm(self):
        exts = [synthetic_extraction(k, -0.2, 0.1) for k in (32, 64)]
        report = fit_mu(exts)
        assert report.verdict == "non-POVM"
        assert report.t is None

    def test_recursion_telescopes(self):
        exts = [synthetic_extraction(k, 0.1, 0.0) for k in (32, 64)]
        report = fit_mu(exts)
        assert report.recursion_residuals.max() < 1e-12

    def test_needs_two_levels(self):
        with pytest.raises(ValueError):
            fit_mu([synthetic_extraction(16, 0.1, 0.0)])

    def test_fit_range_guard(self):
        exts = [synthetic_extraction(k, 0.1, 0.0, lmax=3) for k in (16, 32)]
        with pytest.raises(ValueError):
            fit_mu(exts, n_max=6)


class TestClassification:
    def test_heat_recovers_its_time(self, quantizer_cache):
        t = 0.2
        qs = [heat_quantizer(quantizer_cache(k), t) for k in (32, 64)]
        report = classify_to_t(qs)
        assert report.verdict == "POVM-compatible"
        assert 0.19 < report.t < 0.21
        # equivalence residuals against the fitted heat reference decay
        # at second order once the level is in range
        assert report.exponent is not None and report.exponent > 1.5

    def test_standard_is_equivalent_to_standard(self, quantizer_cache):
        qs = [quantizer_cache(k) for k in (16, 32)]
        report = classify_to_t(qs)
        assert report.verdict == "equivalent-to-standard"
        assert report.t == 0.0

    def test_metaplectic_is_non_povm(self, quantizer_cache):
        qs = [metaplectic_quantizer(quantizer_cache(k)) for k in (16, 32)]
        report = classify_to_t(qs)
        assert report.verdict == "non-POVM"
        assert report.t is None
        assert abs(report.mu) < 0.05

    def test_report_text_layout(self, quantizer_cache):
        qs = [heat_quantizer(quantizer_cache(k), 0.1) for k in (16, 32)]
        text = classify_to_t(qs).to_text()
        assert text.startswith("mu = ")
        assert "verdict = POVM-compatible" in text
        assert "mu[k=16]" in text and "mu[k=32]" in text
        assert "residual[k=32,leg3]" in text


class TestLegendreIdentities:
    @pytest.mark.parametrize("n", [1, 2, 3, 10, 25, 40])
    def test_residuals_small(self, n):
        rp, rg = legendre_identity_check(n)
        assert rp < 1e-8
        assert rg < 1e-8

    def test_known_coefficients(self):
        # n = 1: product coefficient 2/3, pairing coefficient 4/3
        # n = 2: product coefficient 3/5, pairing coefficient 12/5
        assert (1 + 1) / (2 * 1 + 1) == pytest.approx(2 / 3)
        assert 2 * 1 * 2 / (2 * 1 + 1) == pytest.approx(4 / 3)
        assert (2 + 1) / (2 * 2 + 1) == pytest.approx(3 / 5)
        assert 2 * 2 * 3 / (2 * 2 + 1) == pytest.approx(12 / 5)

    def test_degree_guard(self):
        with pytest.raises(ValueError):
            legendre_identity_check(0)


class TestMultiplierCsv:
    def test_round_trip(self, tmp_path, quantizer_cache):
        exts = [
            extract_multipliers(heat_quantizer(quantizer_cache(k), 0.15))
            for k in (8, 16)
        ]
        path = tmp_path / "mult.csv"
        write_multipliers_csv(path, exts)
        back = read_multipliers_csv(path)
        assert [e.k for e in back] == [8, 16]
        for a, b in zip(exts, back):
            assert np.abs(a.multipliers - b.multipliers).max() < 1e-15

    def test_header(self, tmp_path, quantizer_cache):
        ext = extract_multipliers(quantizer_cache(8))
        path = tmp_path / "mult.csv"
        write_multipliers_csv(path, [ext])
        assert path.read_text().splitlines()[0] == "k,l,m_l,alpha_l"

    def test_round_trip_feeds_fit(self, tmp_path):
        exts = [synthetic_extraction(k, 0.1, 0.3) for k in (32, 64)]
        path = tmp_path / "mult.csv"
        write_multipliers_csv(path, exts)
        report = fit_mu(read_multipliers_csv(path))
        assert report.t == pytest.approx(0.1, abs=1e-10)
