import math

import numpy as np
import pytest
from scipy import integrate, special

from qgmarket.distribution import QGaussianParams, pdf
from qgmarket.errors import DomainError, SingularMatrixError
from qgmarket.estimation import estimate_q_beta
from qgmarket.fisher import (
    InfoMatrix2,
    digamma_gap,
    expected_fisher,
    jacobian,
    measured_fisher,
    standard_errors_alpha_kappa,
    standard_errors_q_beta,
    stderr_beta_fixed_q,
    to_q_beta,
)
from qgmarket.sampling import SeededStream, sample_q_gaussian

from conftest import SEED, draw


def test_closed_form_q15():
    m = expected_fisher(QGaussianParams(1.5, 1.0))  # alpha 2, kappa 1/2
    assert m[0, 0] == pytest.approx(math.pi**2 / 3 - 3, rel=1e-12)
    assert m[0, 1] == pytest.approx(0.5)
    assert m[1, 1] == pytest.approx(1.0)


def test_trigamma_entry_value():
    assert expected_fisher(QGaussianParams(1.5, 1.0))[0, 0] == pytest.approx(0.28987, abs=1e-5)


def test_measured_single_value_is_rank_one():
    m = measured_fisher(np.full(50, 0.7), QGaussianParams(1.5, 1.0))
    assert abs(m.det) < 1e-12


def test_diagonal_reduces_to_scalar_chain_rule():
    p = QGaussianParams(1.5, 1.0)
    m = InfoMatrix2(np.diag([0.3, 1.2]))
    s_q, _ = standard_errors_q_beta(p, 100, m)
    s_a, _ = standard_errors_alpha_kappa(100, m)
    assert s_q == pytest.approx(s_a / p.alpha**2, rel=1e-12)


def test_sampled_auxiliary_moments():
    p = QGaussianParams(1.5, 1.0)
    a, k = p.alpha, p.kappa
    x2 = draw(1.5, 1.0, 1000000) ** 2
    assert np.mean(x2 / (1 + k * x2)) == pytest.approx(1 / (2 * k * a), rel=0.01)
    assert np.mean(x2**2 / (1 + k * x2) ** 2) == pytest.approx(3 / (4 * k * k) / (a * (a + 1)), rel=0.01)


def test_digamma_gap_known():
    assert digamma_gap(1.0) == pytest.approx(2 * math.log(2), rel=1e-14)


def test_jacobian():
    j = jacobian(2.0, 0.5)
    np.testing.assert_allclose(j, [[-4.0, 1.0], [0.0, 0.5]])
    assert np.linalg.det(j) == pytest.approx(-2.0)


@pytest.mark.parametrize("q", [1.2, 1.5, 1.65])
def test_auxiliary_expectations(q):
    # the closed forms rest on E[log(1+kx^2)] = gap and E[k x^2/(1+k x^2)] = 1/(2 alpha)
    p = QGaussianParams(q, 1.3)
    a, k = p.alpha, p.kappa
    e_log, _ = integrate.quad(lambda x: math.log1p(k * x * x) * pdf(x, p), -np.inf, np.inf, epsabs=1e-12, limit=200)
    e_rat, _ = integrate.quad(lambda x: k * x * x / (1 + k * x * x) * pdf(x, p), -np.inf, np.inf, epsabs=1e-12, limit=200)
    assert e_log == pytest.approx(float(digamma_gap(a)), rel=1e-8)
    assert e_rat == pytest.approx(0.5 / a, rel=1e-8)


def _score_q_beta(x, q, beta, h=1e-6):
    """Finite-difference scores of log pdf in (q, beta)."""
    lp = lambda qq, bb: math.log(pdf(x, QGaussianParams(qq, bb)))
    dq = (lp(q + h, beta) - lp(q - h, beta)) / (2 * h)
    db = (lp(q, beta + h) - lp(q, beta - h)) / (2 * h)
    return dq, db


@pytest.mark.parametrize("q,beta", [(1.4, 1.0), (1.5, 0.6)])
def test_q_beta_information_by_quadrature(q, beta):
    """Independent oracle: integrate outer products of numerical (q, beta) scores."""
    p = QGaussianParams(q, beta)
    out = np.zeros((2, 2))
    for i, j in [(0, 0), (0, 1), (1, 1)]:
        f = lambda x: _score_q_beta(x, q, beta)[i] * _score_q_beta(x, q, beta)[j] * pdf(x, p)
        out[i, j], _ = integrate.quad(f, -np.inf, np.inf, epsabs=1e-10, limit=400)
    out[1, 0] = out[0, 1]
    got = to_q_beta(expected_fisher(p), p).entries
    np.testing.assert_allclose(got, out, rtol=2e-5)


def test_measured_converges_to_expected():
    p = QGaussianParams(1.5, 1.0)
    x = sample_q_gaussian(p, 1000000, SeededStream(SEED))
    got = measured_fisher(x, p).entries
    np.testing.assert_allclose(got, expected_fisher(p).entries, rtol=0.01)


def test_hessian_matches_expected():
    """Observed information from the likelihood Hessian, per sample."""
    from qgmarket.estimation import log_likelihood
    p = QGaussianParams(1.5, 1.0)
    x = sample_q_gaussian(p, 1000000, SeededStream(SEED))
    x2 = x * x
    a0, k0 = p.alpha, p.kappa
    h = np.array([1e-3 * a0, 1e-3 * k0])
    f = lambda a, k: log_likelihood(x2, a, k) / x.size
    H = np.zeros((2, 2))
    H[0, 0] = (f(a0 + h[0], k0) - 2 * f(a0, k0) + f(a0 - h[0], k0)) / h[0] ** 2
    H[1, 1] = (f(a0, k0 + h[1]) - 2 * f(a0, k0) + f(a0, k0 - h[1])) / h[1] ** 2
    H[0, 1] = H[1, 0] = (f(a0 + h[0], k0 + h[1]) - f(a0 + h[0], k0 - h[1])
                         - f(a0 - h[0], k0 + h[1]) + f(a0 - h[0], k0 - h[1])) / (4 * h[0] * h[1])
    np.testing.assert_allclose(-H, expected_fisher(p).entries, rtol=0.01)


def test_chain_rule_inverse():
    p = QGaussianParams(1.45, 0.8)
    m = expected_fisher(p)
    j = jacobian(p.alpha, p.kappa)
    # J holds d(alpha, kappa)/d(q, beta) transposed, so covariance maps by its inverse
    jinv = np.linalg.inv(j)
    np.testing.assert_allclose(jinv.T @ m.inverse() @ jinv, to_q_beta(m, p).inverse(), rtol=1e-10)
    assert np.linalg.det(j) == pytest.approx(-p.alpha)


def test_stderr_scaling():
    p = QGaussianParams(1.4, 1.0)
    m = expected_fisher(p)
    s1 = standard_errors_q_beta(p, 1000, m)
    s4 = standard_errors_q_beta(p, 4000, m)
    np.testing.assert_allclose(np.array(s1) / np.array(s4), [2.0, 2.0], rtol=1e-12)
    sa, sk = standard_errors_alpha_kappa(1000, m)
    assert sa > 0 and sk > 0


def test_basis_passthrough():
    p = QGaussianParams(1.4, 1.0)
    m = to_q_beta(expected_fisher(p), p)
    assert to_q_beta(m, p) is m


def test_singular():
    with pytest.raises(SingularMatrixError):
        InfoMatrix2(np.ones((2, 2))).inverse()


def test_bad_basis():
    with pytest.raises(ValueError):
        InfoMatrix2(np.eye(2), basis="polar")


def test_gaussian_has_no_closed_form():
    with pytest.raises(DomainError):
        expected_fisher(QGaussianParams(1.0, 1.0))


def test_fixed_q_stderr():
    p = QGaussianParams(1.5, 1.0)
    assert stderr_beta_fixed_q(p, 100) == pytest.approx(0.2)
    g = QGaussianParams(1.0, 2.0)
    assert stderr_beta_fixed_q(g, 200) == pytest.approx(0.2)


@pytest.mark.slow
def test_stderr_matches_replicate_spread():
    """Predicted errors agree with the spread of 500 independent fits within 15%."""
    p = QGaussianParams(1.5, 1.0)
    root = SeededStream(SEED)
    qs, bs, sq, sb = [], [], [], []
    for i in range(500):
        r = estimate_q_beta(sample_q_gaussian(p, 2500, root.split(i)))
        qs.append(r.q); bs.append(r.beta); sq.append(r.stderr_q); sb.append(r.stderr_beta)
    assert np.std(qs) == pytest.approx(np.mean(sq), rel=0.15)
    assert np.std(bs) == pytest.approx(np.mean(sb), rel=0.15)
