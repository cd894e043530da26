"""Orthonormal shifted Legendre kernels on [0, 1]."""

import numpy as np

MAX_ORDER = 16


def _check_unit(x: np.ndarray) -> None:
    if x.size and (np.any(~(x >= 0.0)) or np.any(~(x <= 1.0))):
        raise ValueError("Kernel arguments must lie in [0, 1]")


def legendre_matrix(x, order: int) -> np.ndarray:
    """Evaluate π_1..π_order at every point.

    ``π_k(x) = √(2k+1)·P_k(2x-1)`` with ``P_k`` from the three-term recurrence
    ``(n+1)P_{n+1}(u) = (2n+1)u·P_n(u) - n·P_{n-1}(u)``.

    Returns:
        Array of shape (order, len(x))
    """
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"Kernel order must be in [1, {MAX_ORDER}], got {order}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_unit(x)
    u = 2.0 * x - 1.0
    out = np.empty((order, x.size))
    p_prev = np.ones_like(u)
    p = u
    for n in range(1, order + 1):
        out[n - 1] = np.sqrt(2.0 * n + 1.0) * p
        p_prev, p = p, ((2.0 * n + 1.0) * u * p - n * p_prev) / (n + 1.0)
    return out


def legendre_kernel(k: int, x):
    """π_k evaluated at ``x`` (scalar or array).

    Example:
        >>> legendre_kernel(1, 1.0)
        1.7320508075688772
    """
    values = legendre_matrix(x, k)[k - 1]
    return float(values[0]) if np.ndim(x) == 0 else values
