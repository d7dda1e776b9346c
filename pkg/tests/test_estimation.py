import math

import numpy as np
import pytest
from scipy import optimize

from qgmarket.distribution import QGaussianParams
from qgmarket.errors import DataError, DegenerateSampleError, DomainError, InsufficientSamplesError
from qgmarket.estimation import (
    MIN_SAMPLES,
    Q_HIGH,
    Q_LOW,
    SampleSet,
    estimate_beta_fixed_q,
    estimate_branches,
    estimate_q_beta,
    gradient,
    kappa_for_alpha,
    log_likelihood,
    normalization_from_kappa,
    reduced_equation,
)
from qgmarket.fisher import digamma_gap
from qgmarket.sampling import SeededStream, sample_q_gaussian

from conftest import SEED, draw


@pytest.fixture(scope="module")
def big():
    return draw(1.5, 1.0, 50000)


class TestSampleSet:
    def test_floor(self):
        with pytest.raises(InsufficientSamplesError):
            SampleSet(np.ones(MIN_SAMPLES - 1))
        assert SampleSet(np.arange(MIN_SAMPLES, dtype=float)).count == MIN_SAMPLES

    def test_finite(self):
        v = np.ones(40)
        v[3] = np.nan
        with pytest.raises(DataError):
            SampleSet(v)

    def test_read_only_copy(self):
        v = np.arange(40, dtype=float)
        s = SampleSet(v)
        v[0] = 99
        assert s.values[0] == 0
        with pytest.raises(ValueError):
            s.values[0] = 1


class TestJoint:
    def test_recovers_generator(self, big):
        r = estimate_q_beta(big)
        assert r.boundary_hit is None
        assert abs(r.q - 1.5) < 3 * r.stderr_q
        assert abs(r.beta - 1.0) < 3 * r.stderr_beta
        assert r.stderr_q > 0 and r.stderr_beta > 0

    def test_stationary(self, big):
        r = estimate_q_beta(big)
        assert r.gradient_norm < 1e-8 * big.size
        g = gradient(big * big, r.params.alpha, r.params.kappa)
        assert math.hypot(*g) < 1e-8 * big.size

    def test_is_a_maximum(self, big):
        r = estimate_q_beta(big)
        x2 = big * big
        a, k = r.params.alpha, r.params.kappa
        f0 = log_likelihood(x2, a, k)
        for da, dk in [(0.02, 0), (-0.02, 0), (0, 0.01 * k), (0, -0.01 * k), (0.02, 0.01 * k)]:
            assert log_likelihood(x2, a + da, k + dk) < f0

    def test_two_equation_system_agrees(self, big):
        """Solve both stationarity equations jointly, without the elimination."""
        r = estimate_q_beta(big)
        x2 = big * big

        def eqs(v):
            a, k = math.exp(v[0]), math.exp(v[1])
            ga, gk = gradient(x2, a, k)
            return [ga / x2.size, gk * k / x2.size]

        sol = optimize.fsolve(eqs, [math.log(r.params.alpha * 1.1), math.log(r.params.kappa * 0.9)],
                              xtol=1e-14, full_output=True)
        a, k = np.exp(sol[0])
        assert a == pytest.approx(r.params.alpha, rel=1e-9)
        assert k == pytest.approx(r.params.kappa, rel=1e-9)

    def test_normal_hits_low_boundary(self):
        x = np.random.default_rng(SEED).standard_normal(20000)
        r = estimate_q_beta(x)
        assert r.boundary_hit == Q_LOW
        assert r.q == pytest.approx(1.1)

    def test_very_heavy_hits_high_boundary(self):
        x = draw(2.2, 1.0, 20000)
        r = estimate_q_beta(x)
        assert r.boundary_hit == Q_HIGH
        assert r.q == pytest.approx(1.66)

    def test_scale_invariance(self, big):
        r = estimate_q_beta(big)
        r3 = estimate_q_beta(3.0 * big)
        assert r3.q == pytest.approx(r.q, abs=1e-9)
        assert r3.beta == pytest.approx(r.beta / 9.0, rel=1e-9)

    def test_reduced_equation_vanishes(self, big):
        r = estimate_q_beta(big)
        assert abs(reduced_equation(big * big, r.params.kappa)) < 1e-10

    def test_degenerate(self):
        with pytest.raises(DegenerateSampleError):
            estimate_q_beta(np.full(40, 2.0))

    def test_bad_bounds(self, big):
        with pytest.raises(DomainError):
            estimate_q_beta(big, q_bounds=(1.7, 1.2))

    def test_measured_errors_close(self, big):
        e = estimate_q_beta(big)
        m = estimate_q_beta(big, fisher_kind="measured")
        assert m.stderr_q == pytest.approx(e.stderr_q, rel=0.1)
        with pytest.raises(ValueError):
            estimate_q_beta(big, fisher_kind="observed")

    def test_as_dict(self, big):
        d = estimate_q_beta(big[:100]).as_dict()
        assert d["n"] == 100 and set(d) >= {"q", "beta", "stderr_q", "boundary_hit"}

    @pytest.mark.slow
    def test_sqrt_n_consistency(self):
        p = QGaussianParams(1.5, 1.0)
        root = SeededStream(SEED)
        spread = []
        for j, n in enumerate((1000, 4000)):
            qs = [estimate_q_beta(sample_q_gaussian(p, n, root.split(1000 * j + i))).q for i in range(200)]
            spread.append(np.std(qs))
        assert spread[0] / spread[1] == pytest.approx(2.0, rel=0.2)


class TestFixedQ:
    def test_gaussian_three_points(self):
        x = np.tile([-1.0, 0.0, 1.0], 10)
        r = estimate_beta_fixed_q(x, 1.0)
        assert r.beta == pytest.approx(0.75, rel=1e-15)
        assert r.q_fixed and r.stderr_q == 0.0

    def test_near_gaussian_limit(self):
        x = np.tile([-1.0, 0.0, 1.0], 10)
        r = estimate_beta_fixed_q(x, 1.0 + 1e-6)
        assert r.beta == pytest.approx(0.75, rel=1e-5)

    def test_recovers_beta(self):
        x = draw(1.5, 0.25, 50000)
        r = estimate_beta_fixed_q(x, 1.5)
        assert abs(r.beta - 0.25) < 3 * r.stderr_beta
        assert r.q == 1.5

    @pytest.mark.parametrize("c", [0.01, 0.7, 13.0])
    def test_scaling(self, c):
        x = draw(1.4, 1.0, 2000)
        b = estimate_beta_fixed_q(x, 1.4).beta
        assert estimate_beta_fixed_q(c * x, 1.4).beta == pytest.approx(b / c**2, rel=1e-12)

    def test_stationary_in_kappa(self):
        x = draw(1.4, 1.0, 5000)
        r = estimate_beta_fixed_q(x, 1.4)
        assert r.gradient_norm < 1e-8 * x.size

    def test_seed_does_not_change_answer(self):
        x = draw(1.4, 1.0, 5000)
        a = estimate_beta_fixed_q(x, 1.4).beta
        b = estimate_beta_fixed_q(x, 1.4, beta_seed=37.0).beta
        assert a == pytest.approx(b, rel=1e-12)

    def test_kappa_equation(self):
        x = draw(1.4, 1.0, 5000)
        x2 = x * x
        k = kappa_for_alpha(x2, 2.5)
        assert np.mean(k * x2 / (1 + k * x2)) == pytest.approx(0.2, rel=1e-12)

    def test_mostly_zero(self):
        x = np.zeros(40)
        x[0] = 1.0
        with pytest.raises(DegenerateSampleError):
            estimate_beta_fixed_q(x, 1.5)

    @pytest.mark.parametrize("q", [0.9, 3.0])
    def test_bad_q(self, q):
        with pytest.raises(DomainError):
            estimate_beta_fixed_q(np.arange(40.0), q)


class TestBranches:
    def test_symmetric(self):
        s = draw(1.5, 1.0, 3000)
        left, right = estimate_branches(np.concatenate([s, -s]), 1.5)
        assert left.beta == pytest.approx(right.beta, rel=1e-12)

    def test_asymmetric_mixture(self):
        a = np.abs(draw(1.5, 1.0, 40000, counter=1))
        b = np.abs(draw(1.5, 4.0, 40000, counter=2))
        left, right = estimate_branches(np.concatenate([-a, b]), 1.5)
        assert right.beta > left.beta
        assert abs(left.beta - 1.0) < 3 * left.stderr_beta
        assert abs(right.beta - 4.0) < 3 * right.stderr_beta

    def test_too_few(self):
        x = np.concatenate([np.ones(100), -np.ones(10)])
        with pytest.raises(InsufficientSamplesError):
            estimate_branches(x, 1.5)


def test_normalization_from_kappa():
    p = QGaussianParams(1.45, 2.0)
    assert normalization_from_kappa(p.alpha, p.kappa) == pytest.approx(p.zq, rel=1e-12)


def test_digamma_gap_matches_mean_log_at_truth():
    x = draw(1.5, 1.0, 1000000)
    p = QGaussianParams(1.5, 1.0)
    assert np.mean(np.log1p(p.kappa * x * x)) == pytest.approx(float(digamma_gap(p.alpha)), rel=0.01)
