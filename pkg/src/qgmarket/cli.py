"""Command line front end.

    qgmarket analyze   --input prices.csv [--cpi cpi.csv] --out DIR ...
    qgmarket fit       --input prices.csv ...
    qgmarket gof       --input prices.csv ...
    qgmarket diffusion --input prices.csv | --beta-csv beta.csv --q fixed:V
    qgmarket sample    --q 1.5 --beta 1 --n 1000 --seed 7 --output x.txt

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass
import io
import json
import logging
import math
import os
import sys
from typing import Optional

import numpy as np

from . import __version__
from . import diffusion, estimation, fisher, gof, pipeline
from .distribution import Q_MAX, Q_MIN, QGaussianParams, ccdf_exponent, cdf, pdf, tail_index
from .errors import ConfigError, DataError, DomainError, QGaussError
from .sampling import SeededStream, sample_q_gaussian

log = logging.getLogger("qgmarket")

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
DEFAULT_PDF_DELAYS = (1, 5, 10, 20, 40, 60)


class StageError(Exception):
    def __init__(self, stage, exc):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage
        self.exc = exc


class _stage:
    """Context manager that tags package errors with the stage they came from."""

    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, kind, exc, tb):
        if exc is not None and isinstance(exc, QGaussError) and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


@dataclass
class AnalysisConfig:
    input: Optional[str] = None
    cpi: Optional[str] = None
    cpi_base: Optional[str] = None
    region: Optional[str] = None
    delays: tuple = tuple(range(1, 61))
    q_mode: object = "estimate"  # "estimate" or a float
    gamma: float = 0.05
    seed: int = 0
    syn_factor: float = 1.0
    out: Optional[str] = None
    branches: bool = False
    weighted: bool = False
    restandardize_synthetic: bool = False
    overlapping: bool = True
    fisher_kind: str = "expected"
    workers: int = 1
    normal_band: float = 0.1
    pdf_delays: tuple = DEFAULT_PDF_DELAYS
    beta_csv: Optional[str] = None

    def validate(self):
        if not self.delays:
            raise ConfigError("delays must not be empty")
        d = list(self.delays)
        if d[0] < 1 or any(b <= a for a, b in zip(d, d[1:])):
            raise ConfigError("delays must be strictly increasing integers >= 1")
        if not 0.0 < self.gamma <= 0.2:
            raise ConfigError("gamma must lie in (0, 0.2]")
        if not self.syn_factor > 0:
            raise ConfigError("syn-factor must be positive")
        if self.q_mode != "estimate":
            q = self.q_mode
            if not isinstance(q, float) or not 1.0 <= q < 5.0 / 3.0:
                raise ConfigError("fixed q must lie in [1, 5/3)")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a non-negative 64-bit integer")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.fisher_kind not in ("expected", "measured"):
            raise ConfigError("fisher must be 'expected' or 'measured'")
        if self.region is not None:
            try:
                pipeline.resolve_region(self.region)
            except DataError as exc:
                raise ConfigError(str(exc)) from None
        return self


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------

def parse_delays(text):
    text = text.strip()
    try:
        if ".." in text:
            a, b = text.split("..")
            return tuple(range(int(a), int(b) + 1))
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"bad delay spec {text!r}; use a..b or a,b,c") from None


def parse_q(text):
    text = text.strip().lower()
    if text == "estimate":
        return "estimate"
    if text.startswith("fixed:"):
        try:
            return float(text[6:])
        except ValueError:
            pass
    raise ConfigError(f"bad --q {text!r}; use 'estimate' or 'fixed:<value>'")


def _add_data_flags(p, need_input=True):
    p.add_argument("--input", required=need_input, help="price CSV with header date,close")
    p.add_argument("--cpi", help="CPI CSV with header month,index")
    p.add_argument("--cpi-base", help="base month YYYY-MM for deflation (default: last CPI month)")
    p.add_argument("--region", help="region1, region2 or YYYY-MM-DD:YYYY-MM-DD")
    p.add_argument("--delays", default="1..60", help="a..b or comma list (default 1..60)")
    p.add_argument("--q", dest="q_mode", default="estimate", help="estimate | fixed:<value>")
    p.add_argument("--non-overlapping", action="store_true",
                   help="use non-overlapping start times for t > 1")
    p.add_argument("--fisher", dest="fisher_kind", default="expected",
                   choices=("expected", "measured"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output directory")


def _add_gof_flags(p):
    p.add_argument("--gamma", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--syn-factor", type=float, default=1.0)
    p.add_argument("--restandardize-synthetic", action="store_true")


def _add_diffusion_flags(p):
    p.add_argument("--weighted", action="store_true",
                   help="weight the log-log fit by (beta/stderr)^2")
    p.add_argument("--normal-band", type=float, default=0.1,
                   help="|eta - 1| tolerance for calling diffusion normal")


def build_parser():
    parser = argparse.ArgumentParser(prog="qgmarket", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full workflow: fit, gof, diffusion, reports")
    _add_data_flags(p)
    _add_gof_flags(p)
    _add_diffusion_flags(p)
    p.add_argument("--branches", action="store_true", help="also fit left/right branches")
    p.add_argument("--pdf-delays", default=",".join(map(str, DEFAULT_PDF_DELAYS)))

    p = sub.add_parser("fit", help="q at delay 1 and beta at every delay")
    _add_data_flags(p)
    p.add_argument("--branches", action="store_true")

    p = sub.add_parser("gof", help="KS distance and closeness P per delay")
    _add_data_flags(p)
    _add_gof_flags(p)

    p = sub.add_parser("diffusion", help="power-law and drift/diffusion fits of beta(t)")
    _add_data_flags(p, need_input=False)
    _add_diffusion_flags(p)
    p.add_argument("--beta-csv", help="delay,beta_hat[,stderr] CSV instead of price data")

    p = sub.add_parser("sample", help="draw q-Gaussian deviates")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="file path (default stdout), one value per line")
    return parser


def config_from_args(args):
    cfg = AnalysisConfig(
        input=getattr(args, "input", None),
        cpi=getattr(args, "cpi", None),
        cpi_base=getattr(args, "cpi_base", None),
        region=getattr(args, "region", None),
        delays=parse_delays(args.delays),
        q_mode=parse_q(args.q_mode),
        gamma=getattr(args, "gamma", 0.05),
        seed=getattr(args, "seed", 0),
        syn_factor=getattr(args, "syn_factor", 1.0),
        out=args.out,
        branches=getattr(args, "branches", False),
        weighted=getattr(args, "weighted", False),
        restandardize_synthetic=getattr(args, "restandardize_synthetic", False),
        overlapping=not args.non_overlapping,
        fisher_kind=args.fisher_kind,
        workers=args.workers,
        normal_band=getattr(args, "normal_band", 0.1),
        beta_csv=getattr(args, "beta_csv", None),
    )
    if hasattr(args, "pdf_delays"):
        cfg.pdf_delays = parse_delays(args.pdf_delays)
    return cfg.validate()


# ----------------------------------------------------------------------
# stages
# ----------------------------------------------------------------------

def _map(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def load_panel(cfg):
    with _stage("load"):
        series = pipeline.load_price_series(cfg.input)
        if cfg.cpi:
            cpi = pipeline.load_cpi_series(cfg.cpi)
            base = pipeline.parse_month(cfg.cpi_base) if cfg.cpi_base else None
            series = pipeline.cpi_detrend(series, cpi, base)
    with _stage("region"):
        if cfg.region:
            series = pipeline.slice_region(series, *pipeline.resolve_region(cfg.region))
    with _stage("returns"):
        panel = pipeline.build_return_panel(series, cfg.delays, overlapping=cfg.overlapping)
    return series, panel


def fit_panel(cfg, panel):
    """Delay-1 fit (joint or fixed q) and fixed-q beta for every delay."""
    with _stage("estimate q"):
        if 1 not in panel.samples:
            raise StageError("estimate q", ConfigError("delays must include 1"))
        if cfg.q_mode == "estimate":
            first = estimation.estimate_q_beta(panel[1], fisher_kind=cfg.fisher_kind)
        else:
            first = estimation.estimate_beta_fixed_q(panel[1], cfg.q_mode,
                                                     fisher_kind=cfg.fisher_kind)
    q = first.q
    beta1 = first.beta

    def one(t):
        if t == 1:
            return first
        return estimation.estimate_beta_fixed_q(panel[t], q, beta_seed=beta1 / t,
                                                fisher_kind=cfg.fisher_kind)

    with _stage("estimate beta"):
        fits = dict(zip(panel.delays, _map(one, panel.delays, cfg.workers)))
    return first, fits


def fit_branches(cfg, panel, q, beta1):
    def one(t):
        return estimation.estimate_branches(panel[t], q, beta_seed=beta1 / t,
                                            fisher_kind=cfg.fisher_kind)

    with _stage("branches"):
        return dict(zip(panel.delays, _map(one, panel.delays, cfg.workers)))


def run_gof(cfg, panel, fits):
    root = SeededStream(cfg.seed)

    def one(t):
        return gof.goodness_of_fit(panel[t], fits[t].params, root.split(t), gamma=cfg.gamma,
                                   syn_factor=cfg.syn_factor,
                                   restandardize_synthetic=cfg.restandardize_synthetic)

    with _stage("gof"):
        return dict(zip(panel.delays, _map(one, panel.delays, cfg.workers)))


def beta_series(fits):
    delays = sorted(fits)
    return diffusion.BetaSeries(
        delays=np.array(delays, dtype=float),
        beta_hat=np.array([fits[t].beta for t in delays]),
        stderr=np.array([fits[t].stderr_beta for t in delays]),
    )


def run_diffusion(cfg, series, q):
    with _stage("diffusion"):
        can_drift = len(series) >= 4 and 1.0 in series.delays and q < 2.0
        return diffusion.fit_diffusion(series, q, weighted=cfg.weighted, fit_drift=can_drift)


def classify(lam, band):
    """Mean-square deviation ~ t^eta with eta = -lambda."""
    eta = -lam
    if abs(eta - 1.0) <= band:
        return "normal"
    return "superdiffusive" if eta > 1.0 else "subdiffusive"


# ----------------------------------------------------------------------
# output
# ----------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return repr(v) if math.isfinite(v) else ""


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def json_text(obj):
    return json.dumps(_clean(obj), indent=2) + "\n"


def _write(out_dir, name, text):
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def beta_rows(fit_d, series):
    for i, t in enumerate(series.delays):
        yield (int(t), series.beta_hat[i], series.stderr[i], fit_d.beta_powerlaw[i],
               fit_d.beta_sd[i], None if fit_d.beta_dd is None else fit_d.beta_dd[i])


BETA_HEADER = ("delay", "beta_hat", "stderr", "beta_fit_powerlaw", "beta_sd", "beta_dd")
GOF_HEADER = ("delay", "d_max", "d_crit", "p_close", "pass_d", "pass_p")
BRANCH_HEADER = ("delay", "beta_left", "stderr_left", "beta_right", "stderr_right")


def gof_rows(reports):
    for t in sorted(reports):
        r = reports[t]
        yield (t, r.d_max, r.d_crit, r.p_close, r.pass_d, r.pass_p)


def branch_rows(branches):
    for t in sorted(branches):
        left, right = branches[t]
        yield (t, left.beta, left.stderr_beta, right.beta, right.stderr_beta)


def density_table(x, fitted, beta_sd=None, beta_dd=None, min_expected=5.0, n_edges=30):
    """Log-spaced symmetric bins; bins expecting fewer than ``min_expected``
    counts under the fitted model are dropped. Presentation only."""
    x = np.asarray(x, dtype=float)
    n = x.size
    sd = float(x.std())
    xmax = float(np.max(np.abs(x))) * (1 + 1e-9)
    h0 = min(0.05 * sd, 0.5 * xmax)
    pos = np.geomspace(h0, xmax, n_edges)
    edges = np.concatenate((-pos[::-1], pos))
    counts, _ = np.histogram(x, bins=edges)
    lo, hi = edges[:-1], edges[1:]
    expected = n * (np.asarray(cdf(hi, fitted)) - np.asarray(cdf(lo, fitted)))
    keep = expected >= min_expected
    lo, hi, counts, expected = lo[keep], hi[keep], counts[keep], expected[keep]
    centers = 0.5 * (lo + hi)
    width = hi - lo
    mean = float(x.mean())
    gauss = np.exp(-0.5 * ((centers - mean) / sd) ** 2) / (sd * math.sqrt(2 * math.pi))

    def dens(beta):
        if beta is None:
            return [None] * centers.size
        return pdf(centers, QGaussianParams(fitted.q, beta))

    rows = zip(lo, hi, centers, counts, expected, counts / (n * width),
               pdf(centers, fitted), dens(beta_sd), dens(beta_dd), gauss)
    header = ("bin_lo", "bin_hi", "center", "count", "expected_count", "empirical_density",
              "model_density", "sd_density", "dd_density", "gaussian_density")
    return header, list(rows)


def _fit_summary(first, values, n_rows, sigma1, cfg):
    d = {
        "q_mode": "estimate" if cfg.q_mode == "estimate" else "fixed",
        "q_hat": first.q,
        "stderr_q": first.stderr_q,
        "beta1_hat": first.beta,
        "stderr_beta1": first.stderr_beta,
        "alpha": first.params.alpha,
        "kappa": first.params.kappa,
        "boundary_hit": first.boundary_hit,
        "q_range": [Q_MIN, Q_MAX],
        "tail_index": tail_index(first.q) if first.q > 1 else None,
        "ccdf_exponent": ccdf_exponent(first.q) if first.q > 1 else None,
        "n_rows": n_rows,
        "n_delay1": first.n,
        "sigma1": sigma1,
        "log_likelihood": first.objective,
        "gradient_norm": first.gradient_norm,
        "fisher": cfg.fisher_kind,
    }
    if not first.q_fixed:
        # errors from both information matrices, for comparison
        p = first.params
        s_q, s_b = fisher.standard_errors_q_beta(p, first.n, fisher.measured_fisher(values, p))
        e_q, e_b = fisher.standard_errors_q_beta(p, first.n, fisher.expected_fisher(p))
        d["stderr_measured"] = {"q": s_q, "beta": s_b}
        d["stderr_expected"] = {"q": e_q, "beta": e_b}
    return d


def _diffusion_summary(fit_d, q, cfg):
    d = {
        "lambda": fit_d.lam,
        "lambda_stderr": fit_d.lambda_stderr,
        "intercept": fit_d.intercept,
        "weighted": cfg.weighted,
        "classification": classify(fit_d.lam, cfg.normal_band),
        "normal_band": cfg.normal_band,
        "superdiffusion_exponent": diffusion.superdiffusion_exponent(q),
    }
    if fit_d.dd is not None:
        d.update(b=fit_d.dd.b, D=fit_d.dd.D, tau=fit_d.dd.tau,
                 b_at_lower_bound=fit_d.dd.at_lower_bound)
    else:
        d.update(b=None, D=None, tau=None, b_at_lower_bound=None)
    return d


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def cmd_analyze(cfg):
    """Run the whole workflow and write the report bundle into ``cfg.out``."""
    cfg.validate()
    if not cfg.out:
        raise ConfigError("analyze needs --out")
    series, panel = load_panel(cfg)
    first, fits = fit_panel(cfg, panel)
    with _stage("fisher cross-check"):
        summary_fit = _fit_summary(first, panel[1], len(series), panel.sigma1, cfg)
    reports = run_gof(cfg, panel, fits)
    bs = beta_series(fits)
    fit_d = run_diffusion(cfg, bs, first.q)

    files = {}
    files["beta.csv"] = csv_text(BETA_HEADER, beta_rows(fit_d, bs))
    files["gof.csv"] = csv_text(GOF_HEADER, gof_rows(reports))
    idx = {int(t): i for i, t in enumerate(bs.delays)}
    with _stage("pdf compare"):
        for t in cfg.pdf_delays:
            if t not in idx:
                continue
            i = idx[t]
            dd = None if fit_d.beta_dd is None else float(fit_d.beta_dd[i])
            header, rows = density_table(panel[t], fits[t].params, float(fit_d.beta_sd[i]), dd)
            files[f"pdf_compare_{t}.csv"] = csv_text(header, rows)

    summary = {
        "schema_version": SCHEMA_VERSION,
        "config": {
            "input": os.path.basename(cfg.input),
            "cpi": os.path.basename(cfg.cpi) if cfg.cpi else None,
            "region": cfg.region,
            "delays": [min(cfg.delays), max(cfg.delays), len(cfg.delays)],
            "gamma": cfg.gamma,
            "seed": cfg.seed,
            "syn_factor": cfg.syn_factor,
            "overlapping": cfg.overlapping,
            "restandardize_synthetic": cfg.restandardize_synthetic,
        },
        "fit": summary_fit,
        "diffusion": _diffusion_summary(fit_d, first.q, cfg),
        "gof": {
            "n_delays": len(reports),
            "failed_d_delays": [t for t in sorted(reports) if not reports[t].pass_d],
            "failed_p_delays": [t for t in sorted(reports) if not reports[t].pass_p],
        },
    }
    if cfg.branches:
        branches = fit_branches(cfg, panel, first.q, first.beta)
        files["branches.csv"] = csv_text(BRANCH_HEADER, branch_rows(branches))
        with _stage("branches"):
            left = beta_series({t: b[0] for t, b in branches.items()})
            right = beta_series({t: b[1] for t, b in branches.items()})
            summary["branches"] = {
                "lambda_left": diffusion.fit_power_law(left, cfg.weighted)[0],
                "lambda_right": diffusion.fit_power_law(right, cfg.weighted)[0],
            }
    files["summary.json"] = json_text(summary)

    os.makedirs(cfg.out, exist_ok=True)
    for name in sorted(files):
        _write(cfg.out, name, files[name])
    return summary


def cmd_fit(cfg, stdout):
    series, panel = load_panel(cfg)
    first, fits = fit_panel(cfg, panel)
    out = {"schema_version": SCHEMA_VERSION,
           "fit": {k: v for k, v in first.as_dict().items()},
           "tail_index": tail_index(first.q) if first.q > 1 else None,
           "sigma1": panel.sigma1,
           "beta": {str(t): {"beta": f.beta, "stderr": f.stderr_beta, "n": f.n}
                    for t, f in fits.items()}}
    text = csv_text(("delay", "n", "beta_hat", "stderr"),
                    ((t, f.n, f.beta, f.stderr_beta) for t, f in sorted(fits.items())))
    if cfg.branches:
        branches = fit_branches(cfg, panel, first.q, first.beta)
        btext = csv_text(BRANCH_HEADER, branch_rows(branches))
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        _write(cfg.out, "fit.json", json_text(out))
        _write(cfg.out, "beta.csv", text)
        if cfg.branches:
            _write(cfg.out, "branches.csv", btext)
    else:
        stdout.write(json_text(out))
    return out


def cmd_gof(cfg, stdout):
    series, panel = load_panel(cfg)
    first, fits = fit_panel(cfg, panel)
    reports = run_gof(cfg, panel, fits)
    text = csv_text(GOF_HEADER, gof_rows(reports))
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        _write(cfg.out, "gof.csv", text)
    else:
        stdout.write(text)
    return reports


def load_beta_csv(path):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        rows = list(csv.DictReader(fh))
    if not rows or "delay" not in rows[0] or "beta_hat" not in rows[0]:
        raise DataError(f"{path}: need columns delay,beta_hat[,stderr]")
    try:
        t = [float(r["delay"]) for r in rows]
        b = [float(r["beta_hat"]) for r in rows]
        e = [float(r["stderr"]) for r in rows] if "stderr" in rows[0] else None
    except (TypeError, ValueError) as exc:
        raise DataError(f"{path}: {exc}") from None
    return diffusion.BetaSeries(t, b, e)


def cmd_diffusion(cfg, stdout):
    if cfg.beta_csv:
        if cfg.q_mode == "estimate":
            raise ConfigError("--beta-csv needs --q fixed:<value>")
        with _stage("load"):
            bs = load_beta_csv(cfg.beta_csv)
        q = cfg.q_mode
    else:
        if not cfg.input:
            raise ConfigError("diffusion needs --input or --beta-csv")
        series, panel = load_panel(cfg)
        first, fits = fit_panel(cfg, panel)
        bs = beta_series(fits)
        q = first.q
    fit_d = run_diffusion(cfg, bs, q)
    summary = {"schema_version": SCHEMA_VERSION, "q": q, **_diffusion_summary(fit_d, q, cfg)}
    if bs.stderr is None:
        bs = diffusion.BetaSeries(bs.delays, bs.beta_hat, np.full(len(bs), np.nan))
    text = csv_text(BETA_HEADER, beta_rows(fit_d, bs))
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        _write(cfg.out, "diffusion.csv", text)
        _write(cfg.out, "diffusion.json", json_text(summary))
    else:
        stdout.write(text)
        stdout.write(json_text(summary))
    return summary


def cmd_sample(args, stdout):
    try:
        p = QGaussianParams(args.q, args.beta)
        if args.n <= 0:
            raise ConfigError("--n must be positive")
        stream = SeededStream(args.seed)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    x = sample_q_gaussian(p, args.n, stream)
    text = "".join(f"{v!r}\n" for v in x.tolist())
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return x


def _exit_code(exc):
    if isinstance(exc, StageError):
        exc = exc.exc
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, DataError):
        return EXIT_DATA
    return EXIT_NUMERIC


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=stderr)
    try:
        if args.command == "sample":
            cmd_sample(args, stdout)
            return EXIT_OK
        cfg = config_from_args(args)
        if args.command == "analyze":
            summary = cmd_analyze(cfg)
            stdout.write(json_text({"out": cfg.out, "q_hat": summary["fit"]["q_hat"],
                                    "lambda": summary["diffusion"]["lambda"],
                                    "classification": summary["diffusion"]["classification"]}))
        elif args.command == "fit":
            cmd_fit(cfg, stdout)
        elif args.command == "gof":
            cmd_gof(cfg, stdout)
        elif args.command == "diffusion":
            cmd_diffusion(cfg, stdout)
    except (QGaussError, StageError) as exc:
        stage = f" [{exc.stage}]" if isinstance(exc, StageError) else ""
        stderr.write(f"qgmarket: error{stage}: {exc.exc if stage else exc}\n")
        return _exit_code(exc)
    except OSError as exc:
        stderr.write(f"qgmarket: error: {exc}\n")
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
