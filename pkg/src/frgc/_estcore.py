"""Adaptive-parameter math shared by the stream loops.

Both backends (and the compiled kernels, which mirror this in C) must make
bit-identical decisions, so the float expressions here are written with
explicit casts: theta = exp(-float(t*tau) / float(s_numer)) casts each
operand to a double before dividing, matching the C form exactly even when
the accumulator exceeds 2**53.
"""

from __future__ import annotations

import math

THETA_MIN = 1e-6
THETA_MAX = 0.999

# The stream accumulator saturates here so 64-bit kernels can hold it.
# Decision-neutral: theta already clamps to THETA_MAX far below this.
EST_SATURATION = 1 << 62

MAX_ADAPTIVE_M = 64  # format constant: size of the boundary table


def theta_from_rounded(t: int, s_numer: int, tau: int) -> float:
    """Estimate from t symbols with |residual| numerator sum s_numer."""
    if s_numer <= 0:
        return THETA_MIN
    theta = math.exp(-float(t * tau) / float(s_numer))
    if theta < THETA_MIN:
        return THETA_MIN
    if theta > THETA_MAX:
        return THETA_MAX
    return theta


def theta_from_raw(t: int, s_total: float) -> float:
    """Estimate from t symbols with raw |x - xhat| sum s_total."""
    if s_total <= 0.0:
        return THETA_MIN
    theta = math.exp(-float(t) / s_total)
    if theta < THETA_MIN:
        return THETA_MIN
    if theta > THETA_MAX:
        return THETA_MAX
    return theta


def select_m(theta: float, boundaries) -> int:
    """First index whose boundary reaches theta, 1-based; capped at the end.

    Must stay in lockstep with analysis.lookup_m (bisect_left semantics).
    """
    lo, hi = 0, len(boundaries)
    while lo < hi:
        mid = (lo + hi) // 2
        if boundaries[mid] < theta:
            lo = mid + 1
        else:
            hi = mid
    return lo + 1 if lo < len(boundaries) else len(boundaries)
