"""Exact Gaussian simulation of fractional noise and ARFIMA(1, d, 0).

Fractional noise is generated with the Durbin-Levinson (Hosking) recursion
driven by the exact autocovariance,

    X_t = sum_{j=1}^{t} phi_{t,j} X_{t-j} + sqrt(v_t) eps_t,

so the draw has exactly the target Gaussian law. An AR(1) component is
added afterwards by filtering X_t = phi X_{t-1} + u_t over a discarded
burn-in.

Random streams
--------------
Stream ``(seed, stream)`` is ``PCG64(SeedSequence(seed, spawn_key=(stream,)))``
and innovations are ``Generator.standard_normal``. Monte Carlo replication
``r`` uses stream ``r``, so each replication's path depends only on
``(seed, r)`` and never on how many other replications are run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.signal import lfilter

from .model import ArfimaModel, autocovariance

__all__ = [
    "SimConfig",
    "NonPositiveDefiniteError",
    "rng_stream",
    "gaussian_white",
    "innovation_variances",
    "hosking_filter",
    "simulate_fractional",
    "simulate_paths",
]

DEFAULT_BURN_IN = 1000
_BLOCK = 64  # replications per kernel call; keeps the working set in cache


class NonPositiveDefiniteError(ArithmeticError):
    """Durbin-Levinson produced a non-positive innovation variance."""


@dataclass(frozen=True)
class SimConfig:
    model: ArfimaModel
    length: int
    seed: int
    burn_in: int = DEFAULT_BURN_IN
    stream: int = field(default=0)

    def __post_init__(self):
        if self.length < 2:
            raise ValueError("length must be >= 2")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def rng_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for ``(seed, stream)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


def gaussian_white(seed: int, count: int, stream: int = 0) -> np.ndarray:
    """``count`` i.i.d. N(0, 1) draws from stream ``(seed, stream)``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return rng_stream(seed, stream).standard_normal(count)


@njit(cache=True, nogil=True)
def _levinson_variances(gamma):
    n = gamma.shape[0]
    v = np.empty(n)
    phi = np.zeros(n)
    tmp = np.zeros(n)
    v[0] = gamma[0]
    for t in range(1, n):
        acc = gamma[t]
        for j in range(1, t):
            acc -= phi[j] * gamma[t - j]
        k = acc / v[t - 1]
        for j in range(1, t):
            tmp[j] = phi[j] - k * phi[t - j]
        for j in range(1, t):
            phi[j] = tmp[j]
        phi[t] = k
        v[t] = v[t - 1] * (1.0 - k * k)
    return v


@njit(cache=True, nogil=True)
def _hosking_kernel(gamma, eps, out, v):
    # eps, out: (N, R) with replications along the fast axis. Each path's
    # sum runs j = 1..t in order, independent of R.
    n, r = eps.shape
    phi = np.zeros(n)
    tmp = np.zeros(n)
    acc = np.empty(r)
    v[0] = gamma[0]
    if v[0] <= 0.0:
        return 0
    s = math.sqrt(v[0])
    for i in range(r):
        out[0, i] = s * eps[0, i]
    for t in range(1, n):
        a = gamma[t]
        for j in range(1, t):
            a -= phi[j] * gamma[t - j]
        k = a / v[t - 1]
        for j in range(1, t):
            tmp[j] = phi[j] - k * phi[t - j]
        for j in range(1, t):
            phi[j] = tmp[j]
        phi[t] = k
        v[t] = v[t - 1] * (1.0 - k * k)
        if not v[t] > 0.0:
            return t
        for i in range(r):
            acc[i] = 0.0
        for j in range(1, t + 1):
            c = phi[j]
            for i in range(r):
                acc[i] += c * out[t - j, i]
        s = math.sqrt(v[t])
        for i in range(r):
            out[t, i] = acc[i] + s * eps[t, i]
    return n


def innovation_variances(gamma) -> np.ndarray:
    """Durbin-Levinson one-step prediction variances v_0, ..., v_{N-1}."""
    return _levinson_variances(np.ascontiguousarray(gamma, dtype=float))


def hosking_filter(gamma, eps) -> np.ndarray:
    """Map standard normal innovations to a Gaussian path with autocovariance ``gamma``.

    Parameters
    ----------
    gamma : array_like, shape (N,)
        Autocovariances at lags 0..N-1.
    eps : array_like, shape (N,) or (R, N)
        Standard normal innovations, one row per path.

    Returns
    -------
    ndarray
        Paths with the same shape as ``eps``.
    """
    gamma = np.ascontiguousarray(gamma, dtype=float)
    eps = np.asarray(eps, dtype=float)
    single = eps.ndim == 1
    rows = eps[None, :] if single else eps
    n = rows.shape[1]
    if gamma.shape[0] < n:
        raise ValueError("need autocovariances up to lag N-1")
    paths = np.empty_like(rows)
    v = np.empty(n)
    for start in range(0, rows.shape[0], _BLOCK):
        block = np.ascontiguousarray(rows[start:start + _BLOCK].T)
        out = np.empty_like(block)
        reached = _hosking_kernel(gamma[:n], block, out, v)
        if reached != n:
            raise NonPositiveDefiniteError(
                f"Durbin-Levinson innovation variance non-positive at t={reached}"
            )
        paths[start:start + _BLOCK] = out.T
    return paths[0] if single else paths


def _innovations(seed: int, streams, count: int) -> np.ndarray:
    return np.stack([gaussian_white(seed, count, s) for s in streams])


def simulate_paths(model: ArfimaModel, length: int, seed: int, streams,
                   burn_in: int = DEFAULT_BURN_IN) -> np.ndarray:
    """Simulate one path per stream index; returns shape (len(streams), length).

    Row ``i`` equals ``simulate_fractional(SimConfig(model, length, seed,
    burn_in, streams[i]))`` exactly.
    """
    streams = list(streams)
    if length < 2:
        raise ValueError("length must be >= 2")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    if model.phi == 0.0:
        gamma = autocovariance(model, length - 1)
        return hosking_filter(gamma, _innovations(seed, streams, length))

    total = length + burn_in
    gamma = autocovariance(model.fractional_part, total - 1)
    u = hosking_filter(gamma, _innovations(seed, streams, total))
    x = lfilter([1.0], [1.0, -model.phi], u, axis=1)
    return np.ascontiguousarray(x[:, burn_in:])


def simulate_fractional(config: SimConfig) -> np.ndarray:
    """One exact Gaussian sample path of length ``config.length``."""
    return simulate_paths(config.model, config.length, config.seed,
                          [config.stream], config.burn_in)[0]
