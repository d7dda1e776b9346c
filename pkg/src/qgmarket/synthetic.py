"""Synthetic price series with i.i.d. q-Gaussian log increments.

Used as the bundled end-to-end fixture: with independent increments the
variance of t-day returns grows linearly in t, so beta(t) should fall as
1/t (normal diffusion).
"""

import datetime as dt
import math
from importlib import resources

import numpy as np

from .distribution import QGaussianParams, variance
from .pipeline import PriceSeries
from .sampling import SeededStream, sample_q_gaussian

FIXTURE_NAME = "synthetic_walk.csv"
FIXTURE_Q = 1.5
FIXTURE_ROWS = 10_000
FIXTURE_SEED = 0
FIXTURE_STEP = 0.01  # daily log-return scale


def business_days(start, n):
    out = []
    day = start
    while len(out) < n:
        if day.weekday() < 5:
            out.append(day)
        day += dt.timedelta(days=1)
    return out


def unit_variance_beta(q):
    """beta giving the q-Gaussian unit variance."""
    return 1.0 / (5.0 - 3.0 * q)


def synthetic_walk(n_rows=FIXTURE_ROWS, q=FIXTURE_Q, seed=FIXTURE_SEED,
                   step=FIXTURE_STEP, start=dt.date(1990, 1, 1), s0=100.0):
    """Closes S_k = s0 * exp(step * cumsum(z)) with z unit-variance q-Gaussian."""
    p = QGaussianParams(q, unit_variance_beta(q))
    assert math.isclose(variance(p), 1.0)
    z = sample_q_gaussian(p, n_rows - 1, SeededStream(seed))
    logp = math.log(s0) + step * np.concatenate(([0.0], np.cumsum(z)))
    return PriceSeries(tuple(business_days(start, n_rows)), np.exp(logp))


def write_price_csv(series, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("date,close\n")
        for d, c in zip(series.dates, series.closes):
            fh.write(f"{d.isoformat()},{float(c)!r}\n")


def fixture_path():
    """Location of the bundled fixture CSV."""
    return resources.files("qgmarket") / "data" / FIXTURE_NAME
