"""Standard normal CDF and quantile through erfc / erfcinv."""

import numpy as np
from scipy.special import erfc, erfcinv

SQRT2 = float(np.sqrt(2.0))


def normal_cdf(x):
    """Φ(x) = ½·erfc(−x/√2); accurate in the lower tail."""
    return 0.5 * erfc(-np.asarray(x, dtype=float) / SQRT2)


def normal_ppf(p):
    """Φ⁻¹(p) = −√2·erfcinv(2p)."""
    return -SQRT2 * erfcinv(2.0 * np.asarray(p, dtype=float))
