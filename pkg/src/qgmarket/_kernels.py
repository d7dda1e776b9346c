"""Hot inner loops, compiled with numba when available.

Every kernel exists twice: a plain numpy version (``*_np``) and a loop
version compiled with ``numba.njit`` (``*_nb``). The public names of the
merge walks and the kappa root-finder sum bind to the numba versions
unless numba is missing or the environment variable
``QGMARKET_DISABLE_NUMBA`` is set to a truthy value before import. The
log- and pow-heavy kernels always use numpy, which vectorizes them
better than a scalar loop.

Both versions must agree to floating-point round-off; the test suite
checks them against each other and ``benchmarks/bench_kernels.py``
times them.
"""

import math
import os

import numpy as np

_FLAG = os.environ.get("QGMARKET_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED

_LOG_LIMIT = 1e-8


# ----------------------------------------------------------------------
# numpy reference versions
# ----------------------------------------------------------------------

def kappa_moments_np(x2, kappa):
    """Means of log(1 + kappa*x2) and x2/(1 + kappa*x2)."""
    kx = kappa * x2
    return np.mean(np.log1p(kx)), np.mean(x2 / (1.0 + kx))


def kappa_fraction_np(x2, kappa):
    """Mean of kappa*x2/(1 + kappa*x2); increasing in kappa."""
    kx = kappa * x2
    return np.mean(kx / (1.0 + kx))


def score_products_np(x2, alpha, kappa, dpsi):
    kx = kappa * x2
    s_a = dpsi - np.log1p(kx)
    s_k = 0.5 / kappa - alpha * x2 / (1.0 + kx)
    return np.mean(s_a * s_a), np.mean(s_a * s_k), np.mean(s_k * s_k)


def ks_sorted_np(a, b):
    grid = np.concatenate((a, b))
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def closeness_count_np(emp, syn, model_cdf):
    f_emp = np.searchsorted(emp, emp, side="right") / emp.size
    f_syn = np.searchsorted(syn, emp, side="right") / syn.size
    return int(np.count_nonzero(np.abs(f_emp - model_cdf) <= np.abs(f_syn - model_cdf)))


def box_muller_np(u1, u2, qprime):
    if abs(qprime - 1.0) < _LOG_LIMIT:
        lq = np.log(u1)
    else:
        lq = (u1 ** (1.0 - qprime) - 1.0) / (1.0 - qprime)
    return np.sqrt(-2.0 * lq) * np.cos(2.0 * np.pi * u2)


# ----------------------------------------------------------------------
# loop versions for numba
# ----------------------------------------------------------------------

def kappa_moments_loop(x2, kappa):
    n = x2.shape[0]
    s_log = 0.0
    s_rat = 0.0
    for i in range(n):
        kx = kappa * x2[i]
        s_log += math.log1p(kx)
        s_rat += x2[i] / (1.0 + kx)
    return s_log / n, s_rat / n


def kappa_fraction_loop(x2, kappa):
    n = x2.shape[0]
    s = 0.0
    for i in range(n):
        kx = kappa * x2[i]
        s += kx / (1.0 + kx)
    return s / n


def score_products_loop(x2, alpha, kappa, dpsi):
    n = x2.shape[0]
    aa = 0.0
    ak = 0.0
    kk = 0.0
    half_inv = 0.5 / kappa
    for i in range(n):
        kx = kappa * x2[i]
        sa = dpsi - math.log1p(kx)
        sk = half_inv - alpha * x2[i] / (1.0 + kx)
        aa += sa * sa
        ak += sa * sk
        kk += sk * sk
    return aa / n, ak / n, kk / n


def ks_sorted_loop(a, b):
    n1 = a.shape[0]
    n2 = b.shape[0]
    i = 0
    j = 0
    d = 0.0
    while i < n1 and j < n2:
        x = a[i] if a[i] <= b[j] else b[j]
        while i < n1 and a[i] <= x:
            i += 1
        while j < n2 and b[j] <= x:
            j += 1
        diff = abs(i / n1 - j / n2)
        if diff > d:
            d = diff
    # once one sample is exhausted its ECDF is 1; the gap only shrinks
    return d


def closeness_count_loop(emp, syn, model_cdf):
    n1 = emp.shape[0]
    n2 = syn.shape[0]
    count = 0
    i = 0
    j = 0
    while i < n1:
        x = emp[i]
        k = i
        while k < n1 and emp[k] <= x:
            k += 1
        while j < n2 and syn[j] <= x:
            j += 1
        f_emp = k / n1
        f_syn = j / n2
        for m in range(i, k):
            if abs(f_emp - model_cdf[m]) <= abs(f_syn - model_cdf[m]):
                count += 1
        i = k
    return count


def box_muller_loop(u1, u2, qprime):
    n = u1.shape[0]
    out = np.empty(n)
    two_pi = 2.0 * math.pi
    use_log = abs(qprime - 1.0) < _LOG_LIMIT
    expo = 1.0 - qprime
    for i in range(n):
        if use_log:
            lq = math.log(u1[i])
        else:
            lq = (u1[i] ** expo - 1.0) / expo
        out[i] = math.sqrt(-2.0 * lq) * math.cos(two_pi * u2[i])
    return out


if HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    kappa_moments_nb = _jit(kappa_moments_loop)
    kappa_fraction_nb = _jit(kappa_fraction_loop)
    score_products_nb = _jit(score_products_loop)
    ks_sorted_nb = _jit(ks_sorted_loop)
    closeness_count_nb = _jit(closeness_count_loop)
    box_muller_nb = _jit(box_muller_loop)
else:  # pragma: no cover
    kappa_moments_nb = kappa_moments_np
    kappa_fraction_nb = kappa_fraction_np
    score_products_nb = score_products_np
    ks_sorted_nb = ks_sorted_np
    closeness_count_nb = closeness_count_np
    box_muller_nb = box_muller_np

# numpy's vectorized log1p/pow beat a scalar numba loop, so these stay on
# numpy under both backends (see benchmarks/bench_kernels.py)
kappa_moments = kappa_moments_np
score_products = score_products_np
box_muller = box_muller_np

if USE_NUMBA:
    kappa_fraction = kappa_fraction_nb
    ks_sorted = ks_sorted_nb
    closeness_count = closeness_count_nb
else:
    kappa_fraction = kappa_fraction_np
    ks_sorted = ks_sorted_np
    closeness_count = closeness_count_np


def backend():
    """Name of the active kernel backend: ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"
