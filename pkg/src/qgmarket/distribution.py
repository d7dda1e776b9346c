"""Symmetric q-Gaussian density and friends.

The density is

    P(x) = [1 + (q-1) beta (x - mean)^2]^(1/(1-q)) / Z_q,   Z_q = C_q / sqrt(beta)

for 1 <= q < 3. It is a Student-t with nu = 2/(q-1) - 1 degrees of freedom
after the rescaling t = (x - mean) * sqrt(kappa * nu), kappa = beta (q-1),
which is how the CDF is evaluated. Parameters within ``GAUSS_LIMIT`` of
q = 1 use the Gaussian limit exp(-beta x^2) analytically.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import special

from .errors import DivergenceError, DomainError

GAUSS_LIMIT = 1e-8
SQRT_PI = math.sqrt(math.pi)

# q range the estimators are allowed to return
Q_MIN = 1.1
Q_MAX = 1.66


def _is_gaussian(q):
    return abs(q - 1.0) < GAUSS_LIMIT


def q_log(x, q):
    """q-logarithm ``(x**(1-q) - 1)/(1-q)``; natural log as q -> 1."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("q_log requires x > 0")
    if _is_gaussian(q):
        out = np.log(x)
    else:
        out = np.expm1((1.0 - q) * np.log(x)) / (1.0 - q)
    return out if out.ndim else float(out)


def _gamma_ratio_sqrt(alpha):
    """sqrt(alpha) * Gamma(alpha - 1/2) / Gamma(alpha), stable for large alpha."""
    if alpha < 160.0:
        # direct ratio: gammaln differences lose ~1e-12 here
        return math.sqrt(alpha) * special.gamma(alpha - 0.5) / special.gamma(alpha)
    # Gamma(y + 1/2)/Gamma(y) = sqrt(y) * S(y) with y = alpha - 1/2
    y = alpha - 0.5
    s = (1.0 - 1.0 / (8 * y) + 1.0 / (128 * y**2) + 5.0 / (1024 * y**3)
         - 21.0 / (32768 * y**4) - 399.0 / (262144 * y**5) + 869.0 / (4194304 * y**6))
    return math.sqrt(alpha / y) / s


def normalization_cq(q):
    """Beta-independent part of the normalization, C_q = Z_q * sqrt(beta)."""
    if not (1.0 <= q < 3.0):
        raise DomainError(f"C_q needs 1 <= q < 3, got {q!r}")
    if _is_gaussian(q):
        return SQRT_PI
    alpha = 1.0 / (q - 1.0)
    return SQRT_PI * _gamma_ratio_sqrt(alpha)


def tail_index(q):
    """Tail index (q+1)/(q-1) as conventionally quoted for q-Gaussians.

    This is the density decay exponent 2/(q-1) plus one. The survival
    function itself decays with :func:`ccdf_exponent`.
    """
    if not q > 1.0:
        raise DomainError("tail index is only defined for q > 1")
    return (q + 1.0) / (q - 1.0)


def ccdf_exponent(q):
    """eta in P(|X| > x) ~ x^-eta, i.e. (3-q)/(q-1) = Student-t dof."""
    if not q > 1.0:
        raise DomainError("power-law tail needs q > 1")
    return (3.0 - q) / (q - 1.0)


@dataclass(frozen=True)
class QGaussianParams:
    """Entropic index ``q``, inverse width ``beta`` and location ``mean``.

    ``alpha = 1/(q-1)`` and ``kappa = beta/alpha`` are the decoupled
    coordinates used by the likelihood equations.
    """

    q: float
    beta: float
    mean: float = 0.0

    def __post_init__(self):
        q = float(self.q)
        beta = float(self.beta)
        if not (1.0 <= q < 3.0):
            raise DomainError(f"q must lie in [1, 3), got {q!r}")
        if not (beta > 0.0 and math.isfinite(beta)):
            raise DomainError(f"beta must be positive and finite, got {beta!r}")
        if not math.isfinite(self.mean):
            raise DomainError("mean must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "mean", float(self.mean))

    @classmethod
    def from_alpha_kappa(cls, alpha, kappa, mean=0.0):
        return cls(q=1.0 + 1.0 / alpha, beta=kappa * alpha, mean=mean)

    @property
    def is_gaussian(self):
        return _is_gaussian(self.q)

    @property
    def alpha(self):
        return math.inf if self.q == 1.0 else 1.0 / (self.q - 1.0)

    @property
    def kappa(self):
        return self.beta * (self.q - 1.0)

    @property
    def cq(self):
        return normalization_cq(self.q)

    @property
    def zq(self):
        return self.cq / math.sqrt(self.beta)

    @property
    def q_variance(self):
        """sigma_q^2 from beta = 1/(2 sigma_q^2 Z_q^(q-1))."""
        return 1.0 / (2.0 * self.beta * self.zq ** (self.q - 1.0))

    @property
    def dof(self):
        """Degrees of freedom of the equivalent Student-t."""
        return 2.0 * self.alpha - 1.0


def pdf(x, p):
    x = np.asarray(x, dtype=float)
    d2 = (x - p.mean) ** 2
    if p.is_gaussian:
        out = np.sqrt(p.beta / math.pi) * np.exp(-p.beta * d2)
    else:
        out = np.exp(-p.alpha * np.log1p(p.kappa * d2)) / p.zq
    return out if out.ndim else float(out)


def logpdf(x, p):
    x = np.asarray(x, dtype=float)
    d2 = (x - p.mean) ** 2
    if p.is_gaussian:
        out = 0.5 * math.log(p.beta / math.pi) - p.beta * d2
    else:
        out = -p.alpha * np.log1p(p.kappa * d2) - math.log(p.zq)
    return out if out.ndim else float(out)


def cdf(x, p):
    """Distribution function through the regularized incomplete beta."""
    x = np.asarray(x, dtype=float)
    d = x - p.mean
    if p.is_gaussian:
        out = 0.5 * special.erfc(-d * math.sqrt(p.beta))
    else:
        nu = p.dof
        t2 = p.kappa * nu * d * d
        with np.errstate(invalid="ignore", divide="ignore"):
            tail = 0.5 * special.betainc(0.5 * nu, 0.5, nu / (nu + t2))
        tail = np.where(np.isinf(d), 0.0, tail)
        out = np.where(d < 0, tail, 1.0 - tail)
    return out if out.ndim else float(out)


def variance(p):
    """Ordinary variance 1/((5 - 3q) beta), finite only for q < 5/3."""
    if p.is_gaussian:
        return 0.5 / p.beta
    if p.q >= 5.0 / 3.0:
        raise DivergenceError(f"variance diverges for q >= 5/3 (q={p.q})")
    return 1.0 / ((5.0 - 3.0 * p.q) * p.beta)
