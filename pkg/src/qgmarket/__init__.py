"""q-Gaussian maximum-likelihood fits of return distributions and
diffusion-type classification of their time scaling."""

__version__ = "0.1.0"

from ._kernels import backend
from .distribution import (
    QGaussianParams,
    ccdf_exponent,
    cdf,
    normalization_cq,
    pdf,
    q_log,
    tail_index,
    variance,
)
from .estimation import (
    EstimationResult,
    SampleSet,
    estimate_beta_fixed_q,
    estimate_branches,
    estimate_q_beta,
)
from .fisher import InfoMatrix2, expected_fisher, measured_fisher, standard_errors_q_beta
from .sampling import SeededStream, sample_q_gaussian
from .gof import GofReport, closeness_p_value, ks_critical, ks_distance
from .diffusion import (
    BetaSeries,
    DiffusionFit,
    DriftDiffusionParams,
    beta_drift_diffusion,
    beta_superdiffusion,
    fit_drift_params,
    fit_power_law,
)
from .pipeline import (
    CpiSeries,
    PriceSeries,
    ReturnPanel,
    build_return_panel,
    cpi_detrend,
    load_price_series,
    slice_region,
)
