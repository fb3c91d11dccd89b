"""Epoch-averaged log-periodogram estimation of the long-memory parameter d."""

__version__ = "0.1.0"

from .estimator import (BandwidthRule, EstimateReport, estimate, regression_weights,
                        resolve_bandwidth)
from .model import ArfimaModel, autocovariance, f_star, spectral_density
from .montecarlo import McConfig, McSummary, emit_table, run_mc, run_mc_detailed
from .simulate import SimConfig, simulate_fractional, simulate_paths
from .spectral import EpochLayout, averaged_periodogram, epoch_dft
from .theory import (KernelQuery, MsePrediction, digamma_int, epoch_mse_ratio,
                     finite_n_dft_covariance, limit_kernel_D, mse_prediction,
                     optimal_bandwidth, trigamma_int)

__all__ = [
    "ArfimaModel", "spectral_density", "f_star", "autocovariance",
    "SimConfig", "simulate_fractional", "simulate_paths",
    "EpochLayout", "epoch_dft", "averaged_periodogram",
    "BandwidthRule", "EstimateReport", "estimate", "regression_weights", "resolve_bandwidth",
    "KernelQuery", "MsePrediction", "digamma_int", "trigamma_int", "optimal_bandwidth",
    "mse_prediction", "epoch_mse_ratio", "limit_kernel_D", "finite_n_dft_covariance",
    "McConfig", "McSummary", "run_mc", "run_mc_detailed", "emit_table",
]
