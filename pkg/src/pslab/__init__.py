"""Probabilistic shaping vs. phase-search carrier recovery simulation toolkit."""

__version__ = "0.1.0"

from .constellation import (  # noqa: E402
    Constellation,
    build_constellation,
    build_cross_qam_32,
    build_square_qam,
    mb_priors,
    moments,
    prior_entropy,
    sample_symbols,
)
from .channel import ChannelParams, make_constant_trajectory, make_wiener_trajectory, transmit  # noqa: E402
from .phase_recovery import RecoveryConfig, decide, run_recovery, supervised_cycle_slip_correct  # noqa: E402
from .analysis import (  # noqa: E402
    estimate_mi_from_samples,
    estimate_mse,
    lambda_max_residual,
    mi_awgn,
    mse_sps_large_n,
    mse_sps_n1,
    solve_lambda_max,
    solve_lambda_optimum,
)

__all__ = [
    "Constellation", "build_constellation", "build_cross_qam_32", "build_square_qam", "mb_priors",
    "moments", "prior_entropy", "sample_symbols", "ChannelParams", "make_constant_trajectory",
    "make_wiener_trajectory", "transmit", "RecoveryConfig", "decide", "run_recovery",
    "supervised_cycle_slip_correct", "estimate_mi_from_samples", "estimate_mse", "lambda_max_residual",
    "mi_awgn", "mse_sps_large_n", "mse_sps_n1", "solve_lambda_max", "solve_lambda_optimum",
]
