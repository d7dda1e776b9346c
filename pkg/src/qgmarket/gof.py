"""Two goodness-of-fit checks of a fitted q-Gaussian against synthetic data.

1. Two-sample Kolmogorov-Smirnov distance between the empirical sample and
   a synthetic sample drawn from the fit, compared with
   D_crit = c(gamma) sqrt((n1 + n2)/(n1 n2)), c(gamma) = sqrt(-ln(gamma/2)/2).
2. Closeness fraction P: at each empirical point, is the empirical CDF at
   least as close to the model CDF as the synthetic CDF is? The fit is
   rejected when P < P_CRIT.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import _kernels
from .distribution import cdf
from .errors import DataError, DomainError
from .sampling import sample_q_gaussian

P_CRIT = 0.1


@dataclass(frozen=True)
class GofReport:
    d_max: float
    d_crit: float
    significance: float
    p_close: float
    n1: int
    n2: int

    @property
    def pass_d(self):
        return self.d_max <= self.d_crit

    @property
    def pass_p(self):
        return self.p_close >= P_CRIT

    def as_dict(self):
        return {
            "d_max": self.d_max,
            "d_crit": self.d_crit,
            "significance": self.significance,
            "p_close": self.p_close,
            "n1": self.n1,
            "n2": self.n2,
            "pass_d": self.pass_d,
            "pass_p": self.pass_p,
        }


def _sorted_sample(a, name):
    a = np.sort(np.asarray(a, dtype=float).ravel())
    if a.size == 0:
        raise DataError(f"{name} sample is empty")
    if np.isnan(a).any():
        raise DataError(f"{name} sample contains NaN")
    return a


def ks_distance(a, b):
    """Largest gap between the two empirical CDFs."""
    return float(_kernels.ks_sorted(_sorted_sample(a, "first"), _sorted_sample(b, "second")))


def ks_coefficient(gamma):
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"significance must lie in (0, 1), got {gamma}")
    return math.sqrt(-0.5 * math.log(0.5 * gamma))


def ks_critical(n1, n2, gamma):
    if n1 < 1 or n2 < 1:
        raise DomainError("sample sizes must be positive")
    return ks_coefficient(gamma) * math.sqrt((n1 + n2) / (n1 * n2))


def closeness_p_value(empirical, synthetic, model):
    """Fraction of empirical points where the empirical CDF is no farther
    from the model CDF than the synthetic CDF (ties count as closer)."""
    emp = _sorted_sample(empirical, "empirical")
    syn = _sorted_sample(synthetic, "synthetic")
    f_model = np.asarray(cdf(emp, model), dtype=float)
    return _kernels.closeness_count(emp, syn, f_model) / emp.size


def restandardize(synthetic, reference):
    """Re-center ``synthetic`` and rescale it to the spread of ``reference``."""
    syn = np.asarray(synthetic, dtype=float)
    ref = np.asarray(reference, dtype=float)
    sd = syn.std()
    if not sd > 0:
        raise DataError("synthetic sample has zero spread")
    return (syn - syn.mean()) * (ref.std() / sd)


def goodness_of_fit(empirical, model, stream, gamma=0.05, syn_factor=1.0,
                    restandardize_synthetic=False):
    """Run both tests against a fresh synthetic sample from ``model``."""
    emp = np.asarray(empirical, dtype=float)
    if emp.size == 0:
        raise DataError("empirical sample is empty")
    n2 = max(1, int(round(syn_factor * emp.size)))
    syn = sample_q_gaussian(model, n2, stream)
    if restandardize_synthetic:
        syn = restandardize(syn, emp)
    return GofReport(
        d_max=ks_distance(emp, syn),
        d_crit=ks_critical(emp.size, n2, gamma),
        significance=gamma,
        p_close=closeness_p_value(emp, syn, model),
        n1=emp.size,
        n2=n2,
    )
