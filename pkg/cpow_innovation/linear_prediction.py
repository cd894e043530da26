"""Autocovariance estimation and the Levinson-Durbin recursion.

Predictor convention throughout the package: ``x̂_t = Σ_i a_i·x_{t-i}``, so the
prediction-error filter is ``1 - Σ_i a_i z^-i``.
"""

from typing import Sequence, Tuple

import numpy as np
from scipy.signal import lfilter

from cpow_innovation.errors import DegenerateInputError


def autocovariance(x: Sequence[float], max_lag: int) -> np.ndarray:
    """Biased sample autocovariances γ_0..γ_max_lag (mean removed)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if max_lag < 0:
        raise ValueError(f"max_lag must be non-negative, got {max_lag}")
    if n <= max_lag:
        raise ValueError(f"Need more than {max_lag} samples, got {n}")
    centered = x - x.mean()
    # FFT correlation, zero-padded against wrap-around
    size = 1 << int(np.ceil(np.log2(2 * n)))
    spectrum = np.fft.rfft(centered, size)
    acov = np.fft.irfft(spectrum * np.conj(spectrum), size)[: max_lag + 1]
    return acov / n


def levinson_durbin(autocov: Sequence[float], order: int) -> Tuple[np.ndarray, np.ndarray, float]:
    """Solve the Yule-Walker equations by the Levinson-Durbin recursion.

    Args:
        autocov: Autocovariances γ_0..γ_p (at least ``order + 1`` values)
        order: Predictor order p

    Returns:
        Tuple of (predictor weights a_1..a_p, reflection coefficients k_1..k_p,
        prediction-error variance)

    Raises:
        DegenerateInputError: If the autocovariance sequence is not positive definite
    """
    r = np.asarray(autocov, dtype=float)
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    if r.size < order + 1:
        raise ValueError(f"Need {order + 1} autocovariances, got {r.size}")
    if not np.isfinite(r[0]) or r[0] <= 0:
        raise DegenerateInputError(f"Zero-lag autocovariance must be positive, got {r[0]}")

    a = np.zeros(order)
    k = np.zeros(order)
    err = float(r[0])
    for m in range(order):
        acc = r[m + 1] - np.dot(a[:m], r[m:0:-1])
        km = acc / err
        if not np.isfinite(km) or abs(km) >= 1.0:
            raise DegenerateInputError(
                f"Autocovariance not positive definite at lag {m + 1} (reflection {km})"
            )
        a[:m] = a[:m] - km * a[:m][::-1]
        a[m] = km
        k[m] = km
        err *= 1.0 - km * km
        if err <= 0:
            raise DegenerateInputError(f"Prediction error variance collapsed at lag {m + 1}")
    return a, k, err


def reflection_coefficients(coeffs: Sequence[float]) -> np.ndarray:
    """Step-down recursion: predictor weights back to reflection coefficients.

    Returns NaN entries once a coefficient reaches magnitude one.
    """
    a = np.asarray(coeffs, dtype=float).copy()
    p = a.size
    k = np.full(p, np.nan)
    for m in range(p, 0, -1):
        km = a[m - 1]
        k[m - 1] = km
        if abs(km) >= 1.0:
            break
        a = (a[: m - 1] + km * a[: m - 1][::-1]) / (1.0 - km * km)
    return k


def is_stable(coeffs: Sequence[float]) -> bool:
    """Whether the prediction-error filter is minimum phase (all poles inside the unit circle)."""
    a = np.asarray(coeffs, dtype=float)
    if a.size == 0:
        return True
    if not np.all(np.isfinite(a)):
        return False
    roots = np.roots(np.concatenate(([1.0], -a)))
    return bool(np.all(np.abs(roots) < 1.0))


def spectral_radius(coeffs: Sequence[float]) -> float:
    """Largest pole magnitude of the AR recursion (0 for white noise)."""
    a = np.asarray(coeffs, dtype=float)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(np.roots(np.concatenate(([1.0], -a))))))


def error_filter(coeffs: Sequence[float]) -> np.ndarray:
    """Prediction-error polynomial ``[1, -a_1, ..., -a_p]``."""
    return np.concatenate(([1.0], -np.asarray(coeffs, dtype=float)))


def synthesize_ar(coeffs: Sequence[float], drive: Sequence[float]) -> np.ndarray:
    """Run a driving sequence through the all-pole filter ``1 / (1 - Σ a_i z^-i)``."""
    return lfilter([1.0], error_filter(coeffs), np.asarray(drive, dtype=float))


def notch_polynomial(freq: float, sample_rate: float, radius: float, multiplicity: int) -> np.ndarray:
    """Error-filter polynomial with ``multiplicity`` conjugate zero pairs at ``freq``.

    The result starts with 1 and can be multiplied into an AR error filter.
    """
    if not 0 < radius < 1:
        raise ValueError(f"Notch radius must lie in (0, 1), got {radius}")
    omega = 2.0 * np.pi * freq / sample_rate
    pair = np.array([1.0, -2.0 * radius * np.cos(omega), radius * radius])
    poly = np.array([1.0])
    for _ in range(multiplicity):
        poly = np.convolve(poly, pair)
    return poly
