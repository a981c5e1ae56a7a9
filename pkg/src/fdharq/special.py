"""Special functions used by the outage integrals."""

import numpy as np
from scipy import special as sp

_TWO_OVER_SQRT_PI = 2.0 / np.sqrt(np.pi)


def bessel_k1(x):
    """Modified Bessel function of the second kind, order one.

    Raises ``ValueError`` for ``x <= 0``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("bessel_k1 is defined for x > 0 only")
    out = sp.k1(x)
    return float(out) if out.ndim == 0 else out


def erfi_scaled(x, s):
    """``exp(-s) * erfi(x)`` without forming ``erfi(x)``.

    Uses ``erfi(x) = 2/sqrt(pi) * exp(x**2) * D(x)`` with D the Dawson
    integral, so only ``exp(x**2 - s)`` is ever evaluated.
    """
    x = np.asarray(x, dtype=float)
    out = _TWO_OVER_SQRT_PI * np.exp(x * x - s) * sp.dawsn(x)
    return float(out) if out.ndim == 0 else out
