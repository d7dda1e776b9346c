"""beta(t) curves implied by the nonlinear Fokker-Planck model, and fits.

Two model curves, both anchored to the estimated beta at t = 1:

* pure nonlinear diffusion:   beta_sd(t) = beta_1 * t^(-2/(3-q))
* linear drift b plus diffusion D:

      beta_dd(t)^(-(3-q)/2) = [2 (2-q) D / b] (C_q^2)^((q-1)/2) (1 - exp(-t/tau)),
      tau = 1 / (b (3-q))

The drift rate is fitted from the ratio beta(t)/beta(1), in which D and
the normalization cancel; D then follows from the t = 1 anchor.
"""

from dataclasses import dataclass, field
import math
from typing import Optional

import numpy as np
from scipy import optimize

from .distribution import normalization_cq
from .errors import DataError, DomainError, OptimizationError

B_MIN = 1e-6
B_MAX = 10.0
_GRID = 241


@dataclass(frozen=True)
class BetaSeries:
    delays: np.ndarray
    beta_hat: np.ndarray
    stderr: Optional[np.ndarray] = None

    def __post_init__(self):
        t = np.asarray(self.delays, dtype=float).ravel()
        b = np.asarray(self.beta_hat, dtype=float).ravel()
        if t.size != b.size:
            raise DataError("delays and beta_hat differ in length")
        if t.size and (np.any(t <= 0) or np.any(np.diff(t) <= 0)):
            raise DataError("delays must be positive and strictly increasing")
        if np.any(~(b > 0)):
            raise DataError("beta_hat must be positive")
        object.__setattr__(self, "delays", t)
        object.__setattr__(self, "beta_hat", b)
        if self.stderr is not None:
            e = np.asarray(self.stderr, dtype=float).ravel()
            if e.size != t.size:
                raise DataError("stderr length mismatch")
            object.__setattr__(self, "stderr", e)

    def __len__(self):
        return self.delays.size


@dataclass(frozen=True)
class DriftDiffusionParams:
    """Drift rate ``b`` (1/day), diffusion coefficient ``D`` and index ``q``.

    The drift offset ``a`` only moves the mean of the distribution and is
    fixed at zero for standardized returns.
    """

    b: float
    D: float
    q: float
    a: float = 0.0
    at_lower_bound: bool = False

    def __post_init__(self):
        if self.a != 0.0:
            raise DomainError("drift offset a is fixed at 0")
        if not self.b >= 0.0:
            raise DomainError("b must be non-negative")
        if not self.D > 0.0:
            raise DomainError("D must be positive")
        if not 1.0 <= self.q < 3.0:
            raise DomainError("q must lie in [1, 3)")

    @property
    def tau(self):
        return characteristic_time(self.b, self.q)

    @property
    def c_prime(self):
        """beta(t) Z_q(t)^2, constant along the solution; equals C_q^2."""
        return normalization_cq(self.q) ** 2

    def as_dict(self):
        return {"b": self.b, "D": self.D, "q": self.q, "a": self.a,
                "tau": self.tau if math.isfinite(self.tau) else None,
                "b_at_lower_bound": self.at_lower_bound}


@dataclass(frozen=True)
class DiffusionFit:
    lam: float
    lambda_stderr: float
    intercept: float
    dd: Optional[DriftDiffusionParams]
    delays: np.ndarray = field(repr=False)
    beta_powerlaw: np.ndarray = field(repr=False)
    beta_sd: np.ndarray = field(repr=False)
    beta_dd: Optional[np.ndarray] = field(repr=False, default=None)


def characteristic_time(b, q):
    if b < 0:
        raise DomainError("b must be non-negative")
    return math.inf if b == 0.0 else 1.0 / (b * (3.0 - q))


def superdiffusion_exponent(q):
    return -2.0 / (3.0 - q)


def _check_q(q):
    if not (1.0 < q < 3.0):
        raise DomainError(f"q must lie in (1, 3), got {q}")


def beta_superdiffusion(t, q, beta1):
    """beta_1 * t^(-2/(3-q)); independent of any drift."""
    _check_q(q)
    if not beta1 > 0:
        raise DomainError("beta1 must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise DomainError("t must be positive")
    out = beta1 * t ** superdiffusion_exponent(q)
    return out if out.ndim else float(out)


def beta_drift_diffusion(t, p):
    if not p.b > 0.0:
        raise DomainError("beta_drift_diffusion needs b > 0; use beta_superdiffusion")
    if p.q >= 2.0:
        raise DomainError("the prefactor 2(2-q)D/b is not positive for q >= 2")
    _check_q(p.q)
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise DomainError("t must be positive")
    q = p.q
    pref = 2.0 * (2.0 - q) * p.D / p.b * p.c_prime ** ((q - 1.0) / 2.0)
    u = -np.expm1(-t / p.tau)
    out = (pref * u) ** (-2.0 / (3.0 - q))
    return out if out.ndim else float(out)


def beta_stationary(p):
    """Limit of beta_dd as t -> infinity."""
    q = p.q
    pref = 2.0 * (2.0 - q) * p.D / p.b * p.c_prime ** ((q - 1.0) / 2.0)
    return pref ** (-2.0 / (3.0 - q))


def fit_power_law(s, weighted=False):
    """Least squares of ln beta against ln t: (slope, intercept, slope stderr).

    With ``weighted`` each point is weighted by 1/var(ln beta) =
    (beta/stderr)^2.
    """
    if len(s) < 3:
        raise DataError("power-law fit needs at least 3 delays")
    x = np.log(s.delays)
    y = np.log(s.beta_hat)
    if weighted:
        if s.stderr is None or np.any(~(s.stderr > 0)):
            raise DataError("weighted fit needs positive stderr values")
        w = (s.beta_hat / s.stderr) ** 2
    else:
        w = np.ones_like(x)
    sw = w.sum()
    xm = (w * x).sum() / sw
    ym = (w * y).sum() / sw
    sxx = (w * (x - xm) ** 2).sum()
    slope = (w * (x - xm) * (y - ym)).sum() / sxx
    intercept = ym - slope * xm
    resid = y - intercept - slope * x
    dof = x.size - 2
    sigma2 = (w * resid**2).sum() / dof if dof > 0 else 0.0
    return float(slope), float(intercept), float(math.sqrt(sigma2 / sxx))


def _log_ratio(t, u, q):
    """ln R(t) with u = 1/tau = b (3-q)."""
    g = -2.0 / (3.0 - q)
    return g * (np.log(-np.expm1(-t * u)) - math.log(-math.expm1(-u)))


def _d_log_ratio(t, u, q):
    """d ln R / d ln u."""
    g = -2.0 / (3.0 - q)
    with np.errstate(over="ignore"):  # t/inf -> 0 is the right limit
        return g * u * (t / np.expm1(t * u) - 1.0 / math.expm1(u))


def _ratio_residuals(s):
    i1 = np.flatnonzero(s.delays == 1.0)
    if i1.size != 1:
        raise DataError("delays must include t = 1")
    mask = s.delays != 1.0
    t = s.delays[mask]
    y = np.log(s.beta_hat[mask] / s.beta_hat[i1[0]])
    return t, y, float(s.beta_hat[i1[0]])


def drift_objective(b, s, q):
    t, y, _ = _ratio_residuals(s)
    r = y - _log_ratio(t, b * (3.0 - q), q)
    return float(np.dot(r, r))


def diffusion_from_anchor(b, q, beta1):
    """D such that beta_dd(1) = beta1."""
    tau = characteristic_time(b, q)
    c2 = normalization_cq(q) ** 2
    return b * beta1 ** (-(3.0 - q) / 2.0) / (
        2.0 * (2.0 - q) * c2 ** ((q - 1.0) / 2.0) * -math.expm1(-1.0 / tau))


def fit_drift_params(s, q):
    """Fit the drift rate from beta(t)/beta(1), then D from the t = 1 anchor.

    The search runs over log b on [B_MIN, B_MAX]: a grid scan locates the
    best cell and the stationary point of the objective is then solved
    to round-off. A minimum at B_MIN (pure-diffusion data) is returned
    with ``at_lower_bound`` set; one at B_MAX is an error.
    """
    _check_q(q)
    if q >= 2.0:
        raise DomainError("drift fit needs q < 2")
    if len(s) < 4:
        raise DataError("drift fit needs at least 4 delays")
    t, y, beta1 = _ratio_residuals(s)
    c = 3.0 - q

    def obj(lb):
        r = y - _log_ratio(t, math.exp(lb) * c, q)
        return float(np.dot(r, r))

    def dobj(lb):
        u = math.exp(lb) * c
        r = y - _log_ratio(t, u, q)
        return float(-2.0 * np.dot(r, _d_log_ratio(t, u, q)))

    lo, hi = math.log(B_MIN), math.log(B_MAX)
    grid = np.linspace(lo, hi, _GRID)
    vals = np.array([obj(g) for g in grid])
    if not np.all(np.isfinite(vals)):
        raise OptimizationError("drift objective is not finite on the search grid")
    k = int(np.argmin(vals))
    at_lower = False
    if k == 0 and dobj(lo) >= 0.0:
        lb = lo
        at_lower = True
    elif k == grid.size - 1 and dobj(hi) <= 0.0:
        raise OptimizationError("no interior minimum: drift rate runs into the upper bound")
    else:
        a = grid[max(k - 1, 0)]
        z = grid[min(k + 1, grid.size - 1)]
        da, dz = dobj(a), dobj(z)
        if da < 0.0 < dz:
            lb = optimize.brentq(dobj, a, z, xtol=1e-14, rtol=1e-15, maxiter=500)
        else:
            res = optimize.minimize_scalar(obj, bounds=(a, z), method="bounded",
                                           options={"xatol": 1e-12})
            lb = float(res.x)
        if lb <= lo + 1e-12:
            at_lower = True
    b = math.exp(lb)
    return DriftDiffusionParams(b=b, D=diffusion_from_anchor(b, q, beta1), q=q,
                                at_lower_bound=at_lower)


def fit_diffusion(s, q, weighted=False, fit_drift=True):
    """Power-law fit plus both model curves anchored at the t = 1 estimate."""
    lam, intercept, lam_se = fit_power_law(s, weighted=weighted)
    t = s.delays
    i1 = np.flatnonzero(t == 1.0)
    if i1.size != 1:
        raise DataError("delays must include t = 1")
    beta1 = float(s.beta_hat[i1[0]])
    dd = fit_drift_params(s, q) if fit_drift else None
    beta_dd = None
    if dd is not None and dd.b > 0.0:
        beta_dd = np.asarray(beta_drift_diffusion(t, dd))
    return DiffusionFit(
        lam=lam,
        lambda_stderr=lam_se,
        intercept=intercept,
        dd=dd,
        delays=t,
        beta_powerlaw=np.exp(intercept) * t**lam,
        beta_sd=np.asarray(beta_superdiffusion(t, q, beta1)),
        beta_dd=beta_dd,
    )
