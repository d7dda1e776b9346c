"""Price and CPI ingestion, deflation, region slicing and return panels.

Standardized log returns for delay t (in trading rows) are

    y(t, t0) = log S(t0 + t) - log S(t0)
    Omega(t, t0) = (y(t, t0) - mu_t) / sigma_1

with mu_t the mean of the delay-t returns and sigma_1 the standard
deviation of the 1-row returns of the same series.
"""

import csv
from dataclasses import dataclass, replace
import datetime as dt
import logging
import math

import numpy as np

from .errors import DataError, DegenerateSampleError

log = logging.getLogger(__name__)

REGIONS = {
    "region1": (dt.date(1991, 11, 11), dt.date(2002, 7, 29)),
    "region2": (dt.date(2002, 7, 30), dt.date(2013, 9, 4)),
}


@dataclass(frozen=True)
class PriceSeries:
    dates: tuple
    closes: np.ndarray
    deflated: bool = False

    def __post_init__(self):
        closes = np.asarray(self.closes, dtype=float).ravel()
        dates = tuple(self.dates)
        if len(dates) != closes.size:
            raise DataError("dates and closes differ in length")
        for i in range(1, len(dates)):
            if not dates[i] > dates[i - 1]:
                raise DataError(f"dates not strictly increasing at row {i + 1}: {dates[i]}")
        bad = np.flatnonzero(~(closes > 0) | ~np.isfinite(closes))
        if bad.size:
            i = int(bad[0])
            raise DataError(f"non-positive or non-finite close at row {i + 1} ({dates[i]})")
        closes.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "closes", closes)

    def __len__(self):
        return self.closes.size


@dataclass(frozen=True)
class CpiSeries:
    months: tuple  # (year, month) pairs
    index: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.index, dtype=float).ravel()
        months = tuple(tuple(m) for m in self.months)
        if len(months) != idx.size:
            raise DataError("months and index differ in length")
        for i in range(1, len(months)):
            if not months[i] > months[i - 1]:
                raise DataError(f"CPI months not strictly increasing at row {i + 1}")
        if np.any(~(idx > 0)):
            raise DataError("CPI index values must be positive")
        object.__setattr__(self, "months", months)
        object.__setattr__(self, "index", idx)

    def lookup(self):
        return dict(zip(self.months, self.index))


@dataclass(frozen=True)
class ReturnPanel:
    samples: dict  # delay -> np.ndarray of Omega
    sigma1: float
    mu: dict  # delay -> mean raw log return

    @property
    def delays(self):
        return sorted(self.samples)

    def __getitem__(self, delay):
        return self.samples[delay]


def _read_rows(path, header):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh, strict=True)
        try:
            first = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        except csv.Error as exc:
            raise DataError(f"{path}:1: {exc}") from exc
        if [c.strip().lower() for c in first] != list(header):
            raise DataError(f"{path}:1: expected header {','.join(header)!r}, got {','.join(first)!r}")
        try:
            for row in reader:
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != len(header):
                    raise DataError(f"{path}:{reader.line_num}: expected {len(header)} fields")
                yield reader.line_num, [c.strip() for c in row]
        except csv.Error as exc:
            raise DataError(f"{path}:{reader.line_num}: {exc}") from exc


def _parse_float(text, path, line):
    try:
        v = float(text)
    except ValueError:
        raise DataError(f"{path}:{line}: not a number: {text!r}") from None
    if not math.isfinite(v):
        raise DataError(f"{path}:{line}: value must be finite")
    return v


def load_price_series(path):
    """Read a ``date,close`` CSV with ISO-8601 dates."""
    dates, closes = [], []
    seen = set()
    for line, (d, c) in _read_rows(path, ("date", "close")):
        try:
            day = dt.date.fromisoformat(d)
        except ValueError:
            raise DataError(f"{path}:{line}: bad date {d!r}") from None
        if day in seen:
            raise DataError(f"{path}:{line}: duplicate date {day}")
        seen.add(day)
        if dates and day < dates[-1]:
            raise DataError(f"{path}:{line}: date {day} is earlier than the previous row")
        price = _parse_float(c, path, line)
        if not price > 0:
            raise DataError(f"{path}:{line}: close must be positive, got {c}")
        dates.append(day)
        closes.append(price)
    if not dates:
        raise DataError(f"{path}: no data rows")
    return PriceSeries(tuple(dates), np.array(closes))


def parse_month(text):
    try:
        y, m = text.split("-")
        y, m = int(y), int(m)
        if len(text) != 7 or not 1 <= m <= 12:
            raise ValueError
    except ValueError:
        raise DataError(f"bad month {text!r}, expected YYYY-MM") from None
    return (y, m)


def load_cpi_series(path):
    """Read a ``month,index`` CSV with ``YYYY-MM`` months."""
    months, values = [], []
    for line, (m, v) in _read_rows(path, ("month", "index")):
        try:
            ym = parse_month(m)
        except DataError as exc:
            raise DataError(f"{path}:{line}: {exc}") from None
        if months and ym <= months[-1]:
            raise DataError(f"{path}:{line}: month {m} out of order or duplicated")
        val = _parse_float(v, path, line)
        if not val > 0:
            raise DataError(f"{path}:{line}: CPI must be positive")
        months.append(ym)
        values.append(val)
    if not months:
        raise DataError(f"{path}: no data rows")
    return CpiSeries(tuple(months), np.array(values))


def cpi_detrend(p, c, base_month=None):
    """Express closes in ``base_month`` money (default: last CPI month).

    Each trading day uses its calendar month's CPI value.
    """
    table = c.lookup()
    base = c.months[-1] if base_month is None else tuple(base_month)
    if base not in table:
        raise DataError(f"base month {base[0]:04d}-{base[1]:02d} not in CPI series")
    cpi = np.empty(len(p))
    for i, day in enumerate(p.dates):
        key = (day.year, day.month)
        if key not in table:
            raise DataError(f"CPI does not cover {key[0]:04d}-{key[1]:02d} (price row {i + 1})")
        cpi[i] = table[key]
    return PriceSeries(p.dates, p.closes * (table[base] / cpi), deflated=True)


def resolve_region(region):
    """Named preset or ``YYYY-MM-DD:YYYY-MM-DD``."""
    if region in REGIONS:
        return REGIONS[region]
    try:
        a, b = region.split(":")
        return dt.date.fromisoformat(a), dt.date.fromisoformat(b)
    except ValueError:
        raise DataError(f"unknown region {region!r}") from None


def slice_region(p, start, end):
    """Inclusive date slice; bounds outside the series are clamped with a warning."""
    if not start <= end:
        raise DataError(f"empty region: start {start} is after end {end}")
    if start < p.dates[0]:
        log.warning("region start %s precedes series start %s; clamping", start, p.dates[0])
    if end > p.dates[-1]:
        log.warning("region end %s follows series end %s; clamping", end, p.dates[-1])
    idx = [i for i, d in enumerate(p.dates) if start <= d <= end]
    if not idx:
        raise DataError(f"region {start}..{end} contains no prices")
    lo, hi = idx[0], idx[-1] + 1
    return replace(p, dates=p.dates[lo:hi], closes=p.closes[lo:hi])


def log_returns(logp, delay, overlapping=True):
    y = logp[delay:] - logp[:-delay]
    if not overlapping:
        y = y[::delay]
    return y


def build_return_panel(p, delays, overlapping=True):
    """Standardized log returns for each delay, sharing the 1-row scale."""
    delays = sorted(int(t) for t in delays)
    if not delays or delays[0] < 1:
        raise DataError("delays must be positive integers")
    if len(p) <= delays[-1]:
        raise DataError(f"series of length {len(p)} is too short for delay {delays[-1]}")
    logp = np.log(p.closes)
    y1 = log_returns(logp, 1)
    sigma1 = float(np.std(y1))
    if not sigma1 > 1e-15 * max(1.0, float(np.max(np.abs(logp)))):
        raise DegenerateSampleError("1-day log returns have zero spread")
    samples, mu = {}, {}
    for t in delays:
        y = log_returns(logp, t, overlapping)
        mu[t] = float(np.mean(y))
        samples[t] = (y - mu[t]) / sigma1
    return ReturnPanel(samples=samples, sigma1=sigma1, mu=mu)
