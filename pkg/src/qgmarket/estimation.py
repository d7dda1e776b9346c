"""Maximum-likelihood fits of the symmetric q-Gaussian.

The log-likelihood of standardized samples in (alpha, kappa) coordinates is

    F = -N ln Z - alpha * sum ln(1 + kappa x_i^2),
    Z = sqrt(pi/kappa) Gamma(alpha - 1/2) / Gamma(alpha)

Setting dF/dkappa = 0 ties alpha to kappa,

    alpha(kappa) = 1 / (2 kappa * mean(x^2 / (1 + kappa x^2))),

which is strictly decreasing in kappa. Substituting into dF/dalpha = 0
leaves one equation in kappa,

    psi(alpha(kappa)) - psi(alpha(kappa) - 1/2) = mean(log(1 + kappa x^2)),

solved by Brent's method over the kappa interval that maps onto the
admissible q range [Q_MIN, Q_MAX].
"""

from dataclasses import dataclass, field
import math
from typing import Optional

import numpy as np
from scipy import optimize, special

from . import _kernels
from . import fisher
from .distribution import Q_MAX, Q_MIN, QGaussianParams
from .errors import (
    DataError,
    DegenerateSampleError,
    DomainError,
    InsufficientSamplesError,
    NoRootError,
)

MIN_SAMPLES = 30
KAPPA_RTOL = 1e-14

Q_LOW = "q_low"
Q_HIGH = "q_high"


@dataclass(frozen=True)
class SampleSet:
    """Standardized returns; at least ``MIN_SAMPLES`` finite values."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size < MIN_SAMPLES:
            raise InsufficientSamplesError(
                f"need at least {MIN_SAMPLES} samples, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise DataError("samples must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def count(self):
        return self.values.size

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class EstimationResult:
    params: QGaussianParams
    stderr_q: float
    stderr_beta: float
    objective: float
    gradient_norm: float
    boundary_hit: Optional[str] = None
    q_fixed: bool = False
    n: int = 0
    info: Optional[fisher.InfoMatrix2] = field(default=None, repr=False)

    @property
    def q(self):
        return self.params.q

    @property
    def beta(self):
        return self.params.beta

    def as_dict(self):
        return {
            "q": self.params.q,
            "beta": self.params.beta,
            "alpha": self.params.alpha,
            "kappa": self.params.kappa,
            "stderr_q": self.stderr_q,
            "stderr_beta": self.stderr_beta,
            "objective": self.objective,
            "gradient_norm": self.gradient_norm,
            "boundary_hit": self.boundary_hit,
            "q_fixed": self.q_fixed,
            "n": self.n,
        }


def _as_sample_set(s):
    return s if isinstance(s, SampleSet) else SampleSet(s)


def log_likelihood(x2, alpha, kappa):
    """F in (alpha, kappa) coordinates for squared samples ``x2``."""
    n = x2.size
    m_log, _ = _kernels.kappa_moments(x2, kappa)
    ln_z = (0.5 * math.log(math.pi / kappa)
            + special.gammaln(alpha - 0.5) - special.gammaln(alpha))
    return float(-n * ln_z - alpha * n * m_log)


def gradient(x2, alpha, kappa):
    """(dF/dalpha, dF/dkappa)."""
    n = x2.size
    m_log, m_rat = _kernels.kappa_moments(x2, kappa)
    return (float(n * (fisher.digamma_gap(alpha) - m_log)),
            float(n * (0.5 / kappa - alpha * m_rat)))


def _gaussian_loglik(x2, beta):
    n = x2.size
    return 0.5 * n * math.log(beta / math.pi) - beta * float(np.sum(x2))


def kappa_for_alpha(x2, alpha, kappa_seed=None):
    """Solve mean(kappa x^2/(1 + kappa x^2)) = 1/(2 alpha) for kappa.

    The left side increases monotonically from 0 to the fraction of
    nonzero samples, so the root is unique when it exists.
    """
    target = 0.5 / alpha
    frac_max = np.count_nonzero(x2) / x2.size
    if not target < frac_max:
        raise DegenerateSampleError(
            "too many zero samples for a q-Gaussian fit at this q")
    v = float(np.mean(x2))
    lo = target / v  # frac(kappa) <= kappa * v, so frac(lo) <= target
    hi = kappa_seed if kappa_seed and kappa_seed > lo else 2.0 * lo

    def h(k):
        return _kernels.kappa_fraction(x2, k) - target

    while h(hi) < 0.0:
        lo, hi = hi, 2.0 * hi
        if not math.isfinite(hi):
            raise NoRootError("could not bracket kappa")
    if h(lo) == 0.0:
        return lo
    return optimize.brentq(h, lo, hi, xtol=1e-300, rtol=KAPPA_RTOL, maxiter=500)


def _alpha_of_kappa(x2, kappa):
    _, m_rat = _kernels.kappa_moments(x2, kappa)
    return 0.5 / (kappa * m_rat)


def reduced_equation(x2, kappa):
    """Residual of the one-variable likelihood equation at ``kappa``."""
    m_log, m_rat = _kernels.kappa_moments(x2, kappa)
    alpha = 0.5 / (kappa * m_rat)
    return fisher.digamma_gap(alpha) - m_log


def _finish(x, alpha, kappa, boundary, fisher_kind):
    n = x.size
    x2 = x * x
    p = QGaussianParams.from_alpha_kappa(alpha, kappa)
    info = _info(x, p, fisher_kind)
    s_q, s_b = fisher.standard_errors_q_beta(p, n, info)
    g = gradient(x2, alpha, kappa)
    return EstimationResult(
        params=p,
        stderr_q=s_q,
        stderr_beta=s_b,
        objective=log_likelihood(x2, alpha, kappa),
        gradient_norm=math.hypot(*g),
        boundary_hit=boundary,
        n=n,
        info=info,
    )


def _info(x, p, kind):
    if kind == "expected":
        return fisher.expected_fisher(p)
    if kind == "measured":
        return fisher.measured_fisher(x, p)
    raise ValueError(f"fisher must be 'expected' or 'measured', not {kind!r}")


def estimate_q_beta(s, q_bounds=(Q_MIN, Q_MAX), fisher_kind="expected"):
    """Joint MLE of (q, beta) with q restricted to ``q_bounds``.

    When the likelihood keeps rising past an end of the q range the fit is
    pinned to that end (the constrained maximum) and ``boundary_hit`` says
    which one.
    """
    s = _as_sample_set(s)
    x = s.values
    x2 = x * x
    if not float(np.var(x)) > 0.0:
        raise DegenerateSampleError("sample variance is zero")
    q_lo, q_hi = q_bounds
    if not (1.0 < q_lo < q_hi < 3.0):
        raise DomainError(f"invalid q bounds {q_bounds}")
    alpha_hi = 1.0 / (q_lo - 1.0)
    alpha_lo = 1.0 / (q_hi - 1.0)

    # a small kappa (large alpha) is the low-q end
    k_a = kappa_for_alpha(x2, alpha_hi)
    k_b = kappa_for_alpha(x2, alpha_lo, kappa_seed=k_a)
    g_a = reduced_equation(x2, k_a)
    g_b = reduced_equation(x2, k_b)
    if not (math.isfinite(g_a) and math.isfinite(g_b)):
        raise NoRootError("likelihood equation is not finite on the admissible range")

    if g_a == 0.0:
        return _finish(x, alpha_hi, k_a, None, fisher_kind)
    if g_b == 0.0:
        return _finish(x, alpha_lo, k_b, None, fisher_kind)
    if (g_a > 0.0) != (g_b > 0.0):
        kappa = optimize.brentq(lambda k: reduced_equation(x2, k), k_a, k_b,
                                xtol=1e-300, rtol=KAPPA_RTOL, maxiter=500)
        alpha = _alpha_of_kappa(x2, kappa)
        return _finish(x, alpha, kappa, None, fisher_kind)
    # g is (1/N) dF/dalpha along the profile: positive means larger alpha
    # (smaller q) is still preferred
    if g_a > 0.0:
        return _finish(x, alpha_hi, k_a, Q_LOW, fisher_kind)
    return _finish(x, alpha_lo, k_b, Q_HIGH, fisher_kind)


def estimate_beta_fixed_q(s, q, beta_seed=None, fisher_kind="expected"):
    """MLE of beta with q held at ``q``; ``stderr_q`` is 0 by construction."""
    s = _as_sample_set(s)
    x = s.values
    n = x.size
    x2 = x * x
    if not (1.0 <= q < 3.0):
        raise DomainError(f"q must lie in [1, 3), got {q}")
    if not float(np.mean(x2)) > 0.0:
        raise DegenerateSampleError("all samples are zero")
    probe = QGaussianParams(q, 1.0)
    if probe.is_gaussian:
        beta = 0.5 / float(np.mean(x2))
        p = QGaussianParams(q, beta)
        return EstimationResult(
            params=p,
            stderr_q=0.0,
            stderr_beta=fisher.stderr_beta_fixed_q(p, n),
            objective=_gaussian_loglik(x2, beta),
            gradient_norm=abs(0.5 * n / beta - float(np.sum(x2))),
            q_fixed=True,
            n=n,
        )
    alpha = probe.alpha
    seed = beta_seed / alpha if beta_seed else None
    kappa = kappa_for_alpha(x2, alpha, kappa_seed=seed)
    p = QGaussianParams.from_alpha_kappa(alpha, kappa)
    # keep q exactly as requested rather than the round trip through alpha
    p = QGaussianParams(q, p.beta)
    info = _info(x, p, fisher_kind)
    _, d_kappa = gradient(x2, alpha, kappa)
    return EstimationResult(
        params=p,
        stderr_q=0.0,
        stderr_beta=fisher.stderr_beta_fixed_q(p, n, info[1, 1]),
        objective=log_likelihood(x2, alpha, kappa),
        gradient_norm=abs(d_kappa),
        q_fixed=True,
        n=n,
        info=info,
    )


def estimate_branches(s, q, beta_seed=None, fisher_kind="expected"):
    """Fixed-q beta fits to the left (x <= 0) and right (x >= 0) halves."""
    x = np.asarray(getattr(s, "values", s), dtype=float)
    left = x[x <= 0.0]
    right = x[x >= 0.0]
    for name, part in (("left", left), ("right", right)):
        if part.size < MIN_SAMPLES:
            raise InsufficientSamplesError(
                f"{name} branch has {part.size} samples, need {MIN_SAMPLES}")
    return (estimate_beta_fixed_q(left, q, beta_seed, fisher_kind),
            estimate_beta_fixed_q(right, q, beta_seed, fisher_kind))


def normalization_from_kappa(alpha, kappa):
    """Z_q in (alpha, kappa) form; equals C_q/sqrt(beta)."""
    return math.sqrt(math.pi / kappa) * math.exp(
        special.gammaln(alpha - 0.5) - special.gammaln(alpha))


__all__ = [
    "MIN_SAMPLES",
    "Q_LOW",
    "Q_HIGH",
    "SampleSet",
    "EstimationResult",
    "estimate_q_beta",
    "estimate_beta_fixed_q",
    "estimate_branches",
    "kappa_for_alpha",
    "reduced_equation",
    "log_likelihood",
    "gradient",
]
