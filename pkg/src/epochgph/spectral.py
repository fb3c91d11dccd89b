"""Epoch DFTs and the epoch-averaged periodogram.

A series of length N = g n is cut into g disjoint consecutive epochs of
length n. Epoch l (0-based) holds the 1-based samples l n + 1, ..., (l+1) n
and its DFT at the Fourier frequency w_k = 2 pi k / n is

    d_l(w_k) = (2 pi n)^(-1/2) sum_{t=1}^{n} X_{t + l n} e^{i t w_k}.

The averaged periodogram is the mean over epochs of |d_l(w_k)|^2 for
k = 1, ..., floor(n/2). No taper, no overlap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EpochLayout",
    "AveragedPeriodogram",
    "fourier_frequencies",
    "naive_dft",
    "epoch_dft",
    "averaged_periodogram",
    "averaged_ordinates",
]


@dataclass(frozen=True)
class EpochLayout:
    """Partition of a length-N series into ``epochs`` blocks of equal length."""

    total_length: int
    epochs: int = 1

    def __post_init__(self):
        N, g = self.total_length, self.epochs
        if g < 1:
            raise ValueError(f"epochs must be >= 1, got {g}")
        if N % g:
            raise ValueError(f"total length {N} is not divisible by {g} epochs")
        if N // g < 4:
            raise ValueError(f"epoch length {N // g} is below the minimum of 4")

    @property
    def epoch_length(self) -> int:
        return self.total_length // self.epochs

    @property
    def n_ordinates(self) -> int:
        return self.epoch_length // 2

    def frequencies(self) -> np.ndarray:
        return fourier_frequencies(self.epoch_length)


@dataclass(frozen=True)
class AveragedPeriodogram:
    layout: EpochLayout
    ordinates: np.ndarray
    frequencies: np.ndarray

    def __post_init__(self):
        if self.ordinates.shape != (self.layout.n_ordinates,):
            raise ValueError("ordinate count must equal floor(n/2)")


def fourier_frequencies(n: int, full_grid: bool = False) -> np.ndarray:
    """w_k = 2 pi k / n for k = 1..floor(n/2) (or 1..n-1 with ``full_grid``)."""
    top = n - 1 if full_grid else n // 2
    return 2.0 * np.pi * np.arange(1, top + 1) / n


def naive_dft(y, omegas) -> np.ndarray:
    """Direct O(n m) evaluation of (2 pi n)^(-1/2) sum_t y_t e^{i t w}, t = 1..n."""
    y = np.asarray(y, dtype=float)
    n = y.shape[-1]
    t = np.arange(1, n + 1)
    kernel = np.exp(1j * np.outer(t, np.asarray(omegas, dtype=float)))
    return (y @ kernel) / np.sqrt(2.0 * np.pi * n)


def _fft_dft(y, full_grid=False):
    # sum_{t=1}^{n} y_t e^{i t w_k} = e^{i w_k} conj(sum_{s=0}^{n-1} y_s e^{-2 pi i k s / n})
    y = np.asarray(y, dtype=float)
    n = y.shape[-1]
    if full_grid:
        F = np.fft.fft(y, axis=-1)[..., 1:]
    else:
        F = np.fft.rfft(y, axis=-1)[..., 1:n // 2 + 1]
    w = fourier_frequencies(n, full_grid)
    return np.exp(1j * w) * np.conj(F) / np.sqrt(2.0 * np.pi * n)


def _check_series(x, layout: EpochLayout) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("series must be one-dimensional")
    return x


def epoch_dft(x, layout: EpochLayout, epoch_index: int, method: str = "fft",
              full_grid: bool = False) -> np.ndarray:
    """DFT of one epoch at k = 1..floor(n/2) (k = 1..n-1 with ``full_grid``).

    ``method="naive"`` is the direct O(n^2) sum; ``"fft"`` must agree with it.
    """
    x = _check_series(x, layout)
    n = layout.epoch_length
    if not 0 <= epoch_index < layout.epochs:
        raise IndexError(f"epoch index {epoch_index} outside 0..{layout.epochs - 1}")
    stop = (epoch_index + 1) * n
    if stop > x.shape[0]:
        raise IndexError(f"epoch {epoch_index} extends past the end of the series")
    y = x[epoch_index * n:stop]
    if method == "fft":
        return _fft_dft(y, full_grid)
    if method == "naive":
        return naive_dft(y, fourier_frequencies(n, full_grid))
    raise ValueError(f"unknown DFT method {method!r}")


def averaged_ordinates(x, epochs: int) -> np.ndarray:
    """Averaged periodogram ordinates of series stacked along the last axis.

    ``x`` has shape (..., N); returns (..., floor(n/2)). Epoch periodograms
    are accumulated in epoch order.
    """
    x = np.asarray(x, dtype=float)
    N = x.shape[-1]
    n = N // epochs
    blocks = x.reshape(x.shape[:-1] + (epochs, n))
    F = np.fft.rfft(blocks, axis=-1)[..., 1:n // 2 + 1]
    per = (F.real**2 + F.imag**2) / (2.0 * np.pi * n)
    total = per[..., 0, :].copy()
    for ell in range(1, epochs):
        total += per[..., ell, :]
    return total / epochs


def averaged_periodogram(x, layout: EpochLayout) -> AveragedPeriodogram:
    """Averaged periodogram of ``x`` under ``layout``."""
    x = _check_series(x, layout)
    if x.shape[0] != layout.total_length:
        raise ValueError(
            f"series length {x.shape[0]} does not match layout length {layout.total_length}"
        )
    return AveragedPeriodogram(layout, averaged_ordinates(x, layout.epochs),
                               layout.frequencies())
