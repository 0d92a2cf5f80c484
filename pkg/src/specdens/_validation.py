"""Input validation helpers shared by the estimator and the CLI."""

from __future__ import annotations

import numpy as np


def check_sample_array(X) -> np.ndarray:
    """Coerce ``X`` to a finite float64 array of shape (n_samples, n_channels).

    One-dimensional input is treated as a single channel.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"sample array must be 1- or 2-dimensional, got shape {X.shape}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"sample array must be non-empty, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("sample array contains non-finite values")
    return X


def check_frequency_grid(frequencies) -> np.ndarray:
    """Coerce ``frequencies`` to a finite, strictly ascending 1-d float array.

    An empty grid is allowed and yields an empty estimate downstream.
    """
    freqs = np.asarray(frequencies, dtype=float)
    if freqs.ndim != 1:
        raise ValueError(f"frequency grid must be 1-dimensional, got shape {freqs.shape}")
    if freqs.size and not np.all(np.isfinite(freqs)):
        raise ValueError("frequency grid contains non-finite values")
    if freqs.size > 1 and not np.all(np.diff(freqs) > 0):
        raise ValueError("frequency grid must be strictly ascending")
    return freqs


def check_positive(name: str, value) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return value


def check_channel(index: int, n_channels: int) -> int:
    index = int(index)
    if not 0 <= index < n_channels:
        raise ValueError(f"channel index {index} out of range for {n_channels} channels")
    return index
