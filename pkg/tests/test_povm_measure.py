"""Discrete outcome families, dilation, and measurement-noise inequalities."""

import numpy as np
import pytest

from fuzzysphere.operator_core import random_density, spectral_norm
from fuzzysphere.povm_measure import (
    DiscretePOVM,
    coherent_state_variance,
    discretize_povm,
    naimark_dilate,
    noise_operator_discrete,
    noise_operator_sampled,
    noise_trial_rows,
    variance_identity_check,
    verify_noise_inequality,
    write_trial_csv,
)
from fuzzysphere.quantization import noise_operator
from fuzzysphere.sphere_fn import (
    SpherePoint,
    angles_from_vectors,
    coordinate,
    random_function,
)
from fuzzysphere.smearing import (
    heat_quantizer,
    metaplectic_quantizer,
    rho_isotropic,
    rho_quantizer,
    vector_twist_quantizer,
)


@pytest.fixture(scope="module")
def povm8(quantizer_cache):
    return discretize_povm(quantizer_cache(8))


class TestDiscretePOVM:
    def test_resolves_identity(self, povm8):
        assert povm8.resolution_residual() < 1e-10

    def test_elements_positive(self, povm8):
        assert povm8.min_element_eigenvalue() > -1e-12

    def test_validate_passes(self, povm8):
        low, resid = povm8.validate()
        assert low > -1e-12 and resid < 1e-10

    def test_labels_are_grid_nodes(self, povm8, quantizer_cache):
        assert np.array_equal(povm8.labels, quantizer_cache(8).grid.vectors)

    def test_integrate_matches_quantizer(self, povm8, quantizer_cache):
        q = quantizer_cache(8)
        f = random_function(3, seed=1)
        lhs = povm8.integrate(f.values_on(q.grid))
        assert spectral_norm(lhs - q.quantize(f)) < 1e-12

    def test_integrate_shape_guard(self, povm8):
        with pytest.raises(ValueError):
            povm8.integrate(np.ones(3))

    def test_validate_rejects_broken_family(self, povm8):
        broken = DiscretePOVM(elements=2.0 * povm8.elements, labels=povm8.labels)
        with pytest.raises(ValueError):
            broken.validate()

    def test_refuses_non_povm_kind(self, quantizer_cache):
        mq = metaplectic_quantizer(quantizer_cache(8))
        assert not mq.is_povm
        with pytest.raises(ValueError):
            discretize_povm(mq)


class TestSmearedFamilies:
    def test_heat_kind_discretizes_exactly(self, quantizer_cache):
        q = heat_quantizer(quantizer_cache(8), 0.2)
        p = discretize_povm(q)
        p.validate()
        f = random_function(3, seed=2)
        vals = f.values(*angles_from_vectors(p.labels))
        assert spectral_norm(p.integrate(vals) - q.quantize(f)) < 1e-10

    def test_twist_kind_relabels_outcomes(self, quantizer_cache):
        q = vector_twist_quantizer(quantizer_cache(8), (0.3, -0.2, 0.9))
        p = discretize_povm(q)
        p.validate()
        f = random_function(3, seed=2)
        vals = f.values(*angles_from_vectors(p.labels))
        assert spectral_norm(p.integrate(vals) - q.quantize(f)) < 1e-12

    def test_markov_kind_discretizes(self, quantizer_cache):
        # resolution and positivity are exact by row-stochastic mixing; the
        # operator moment only matches up to kernel quadrature truncation
        q = rho_quantizer(quantizer_cache(8), rho_isotropic(0.4))
        p = discretize_povm(q)
        p.validate()
        f = random_function(3, seed=3)
        vals = f.values(*angles_from_vectors(p.labels))
        assert spectral_norm(p.integrate(vals) - q.quantize(f)) < 5e-3


class TestNaimark:
    def test_isometry(self, povm8):
        dil = naimark_dilate(povm8)
        assert dil.isometry_residual() < 1e-10

    def test_blocks_reproduce_elements(self, povm8):
        dil = naimark_dilate(povm8)
        for q in (0, 7, povm8.n_outcomes - 1):
            diff = dil.compressed_element(q) - povm8.elements[q]
            assert np.abs(diff).max() < 1e-11

    def test_compressed_observable_matches_integrate(self, povm8, quantizer_cache):
        qz = quantizer_cache(8)
        vals = qz.pre_samples(coordinate(2))
        dil = naimark_dilate(povm8)
        a = dil.dilated_observable_compressed(vals)
        b = povm8.integrate(vals)
        assert spectral_norm(a - b) < 1e-11

    def test_q_pairing_reproduces_noise_operator(self, povm8, quantizer_cache):
        # V† S_u (1 - V V†) S_u V equals the noise operator of u exactly
        qz = quantizer_cache(8)
        u = qz.pre_samples(random_function(3, seed=4))
        delta = noise_operator_discrete(povm8, u)
        pairing = naimark_dilate(povm8).q_pairing(u, u)
        assert spectral_norm(pairing - delta) < 1e-9

    def test_q_pairing_antisymmetric_part_is_commutator(self, povm8, quantizer_cache):
        # q(v,u) - q(u,v) = [compressed U, compressed V]
        qz = quantizer_cache(8)
        u = qz.pre_samples(random_function(2, seed=5))
        v = qz.pre_samples(random_function(2, seed=6))
        dil = naimark_dilate(povm8)
        lhs = dil.q_pairing(v, u) - dil.q_pairing(u, v)
        a = povm8.integrate(u)
        b = povm8.integrate(v)
        assert spectral_norm(lhs - (a @ b - b @ a)) < 1e-10

    def test_q_pairing_diagonal_psd(self, povm8, quantizer_cache):
        qz = quantizer_cache(8)
        u = qz.pre_samples(random_function(3, seed=7))
        pairing = naimark_dilate(povm8).q_pairing(u, u)
        assert np.linalg.eigvalsh(0.5 * (pairing + pairing.conj().T)).min() > -1e-10


class TestNoiseInequality:
    def test_slack_nonnegative_random_trials(self, quantizer_cache):
        rows = noise_trial_rows(quantizer_cache(4), 60, seed=1)
        slacks = [r[2] for r in rows]
        assert min(slacks) > -1e-10

    def test_slack_via_discrete_family(self, povm8, quantizer_cache):
        qz = quantizer_cache(8)
        u = qz.pre_samples(random_function(3, seed=8))
        v = qz.pre_samples(random_function(3, seed=9))
        state = random_density(qz.dim, seed=10)
        assert verify_noise_inequality(povm8, u, v, state) > -1e-10

    def test_sampled_and_discrete_noise_agree(self, povm8, quantizer_cache):
        qz = quantizer_cache(8)
        u = qz.pre_samples(random_function(3, seed=11))
        a = noise_operator_discrete(povm8, u)
        b = noise_operator_sampled(qz, u)
        assert spectral_norm(a - b) < 1e-12

    def test_noise_matches_quantizer_level_form(self, quantizer_cache):
        qz = quantizer_cache(8)
        f = coordinate(2)
        a = noise_operator_sampled(qz, qz.pre_samples(f))
        b = noise_operator(qz, f)
        assert spectral_norm(a - b) < 1e-12

    def test_trial_rows_shape_and_determinism(self, quantizer_cache):
        r1 = noise_trial_rows(quantizer_cache(4), 5, seed=3)
        r2 = noise_trial_rows(quantizer_cache(4), 5, seed=3)
        assert r1 == r2
        assert [r[0] for r in r1] == [0, 1, 2, 3, 4]
        assert all(r[1] == 4 for r in r1)
        for _, _, slack, lhs, rhs in r1:
            assert slack == pytest.approx(lhs - rhs, abs=1e-15)

    def test_trial_csv_format(self, tmp_path, quantizer_cache):
        rows = noise_trial_rows(quantizer_cache(4), 3, seed=5)
        path = tmp_path / "trials.csv"
        write_trial_csv(path, rows)
        lines = path.read_text().splitlines()
        assert lines[0] == "trial,k,slack,lhs,rhs"
        assert len(lines) == 4
        got = [float(x) for x in lines[1].split(",")]
        assert got[0] == 0 and got[1] == 4


class TestVarianceIdentity:
    def test_identity_holds_for_random_states(self, quantizer_cache):
        qz = quantizer_cache(8)
        for seed in range(5):
            f = random_function(3, seed=20 + seed)
            state = random_density(qz.dim, seed=seed)
            assert variance_identity_check(qz, f, state) < 1e-10

    def test_equator_coherent_variance_closed_form(self, quantizer_cache):
        # Var of Q(z) in the equatorial coherent state is k / (k+2)^2
        for k in (8, 32):
            qz = quantizer_cache(k)
            var = coherent_state_variance(qz, coordinate(2), SpherePoint(np.pi / 2, 0.3))
            assert var == pytest.approx(k / (k + 2.0) ** 2, abs=1e-12)

    def test_pole_coherent_variance_vanishing_direction(self, quantizer_cache):
        # at the north pole the z-outcome sharpens as fast as allowed
        k = 8
        qz = quantizer_cache(k)
        var = coherent_state_variance(qz, coordinate(2), SpherePoint(0.0, 0.0))
        assert var < k / (k + 2.0) ** 2
