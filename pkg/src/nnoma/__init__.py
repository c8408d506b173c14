"""Outage simulation and closed-form analysis for three-BS network NOMA.

Three cooperating base stations superpose a cell-edge user's message on
their own near users' messages and steer it by distributed analog
beamforming.  The package provides a deterministic, seedable Monte Carlo
simulator for the outage probabilities and outage sum rates of this scheme
and its benchmarks (cooperative OMA, single-BS NOMA with fixed or best
serving BS, optionally under a Poisson field of co-channel interferers),
plus the matching high-SNR closed-form approximations.

Layout is fixed: BSs on an equilateral triangle of side l centered at the
origin, the cell-edge user uniform on the lens where the three coverage
discs of radius R0 overlap, near user j uniform on a disc of radius R_j
around BS j.  Links are Rayleigh over bounded path loss max(d, 1)^alpha.
"""

from ._backend import HAVE_COMPILED, active_backend
from .analytics import (
    AnalyticOutage,
    EdgeOutageCoefficients,
    PathLossMoment,
    beta_function,
    brute_force_p0_oracle,
    edge_outage_coefficients,
    expected_pathloss_product,
    kappa,
    lower_incomplete_gamma,
    p0_noma_analytic,
    p0_oma_analytic,
    pj_noma_analytic,
    pj_noma_interference_analytic,
)
from .channel import ChannelRealization, path_loss, realize_channel, sample_complex_gaussian
from .engine import CHUNK_TRIALS, SCHEMES, MCResult, estimate_outage
from .geometry import (
    NetworkLayout,
    Point2D,
    UserPlacement,
    bs_positions,
    distances,
    intersection_area,
    lambda_of_k,
    make_layout,
    sample_cell_edge,
    sample_near_user,
    sample_placement,
)
from .interference import (
    InterferenceConfig,
    InterferenceField,
    interference_power,
    laplace_transform_analytic,
    sample_ppp,
)
from .schemes import (
    SchemeConfig,
    TrialOutcome,
    noma_trial,
    oma_trial,
    single_bs_noma_trial,
    sinr_cell_edge,
    sinr_near_own,
    sinr_near_sic,
    thresholds,
)
from .simcli import (
    ConfigError,
    ExperimentConfig,
    OutageEstimate,
    SumRateRow,
    emit_csv,
    figure_preset,
    load_config,
    parse_csv,
    run_outage_sweep,
    run_sum_rate_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "HAVE_COMPILED",
    "active_backend",
    "AnalyticOutage",
    "EdgeOutageCoefficients",
    "PathLossMoment",
    "beta_function",
    "brute_force_p0_oracle",
    "edge_outage_coefficients",
    "expected_pathloss_product",
    "kappa",
    "lower_incomplete_gamma",
    "p0_noma_analytic",
    "p0_oma_analytic",
    "pj_noma_analytic",
    "pj_noma_interference_analytic",
    "ChannelRealization",
    "path_loss",
    "realize_channel",
    "sample_complex_gaussian",
    "CHUNK_TRIALS",
    "SCHEMES",
    "MCResult",
    "estimate_outage",
    "NetworkLayout",
    "Point2D",
    "UserPlacement",
    "bs_positions",
    "distances",
    "intersection_area",
    "lambda_of_k",
    "make_layout",
    "sample_cell_edge",
    "sample_near_user",
    "sample_placement",
    "InterferenceConfig",
    "InterferenceField",
    "interference_power",
    "laplace_transform_analytic",
    "sample_ppp",
    "SchemeConfig",
    "TrialOutcome",
    "noma_trial",
    "oma_trial",
    "single_bs_noma_trial",
    "sinr_cell_edge",
    "sinr_near_own",
    "sinr_near_sic",
    "thresholds",
    "ConfigError",
    "ExperimentConfig",
    "OutageEstimate",
    "SumRateRow",
    "emit_csv",
    "figure_preset",
    "load_config",
    "parse_csv",
    "run_outage_sweep",
    "run_sum_rate_sweep",
]
