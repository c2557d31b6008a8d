"""Windowed least-squares linear prediction.

The order-alpha predictor at time t is xhat_t = sum_j a_j * x_{t-1-j}.
Coefficients minimize the squared error over the most recent ``window``
samples and are refit every ``refit_interval`` symbols.  Both codec sides
run this on identical integer histories, so the float arithmetic agrees
bit for bit within one platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class LpcConfig:
    order: int
    window: int
    refit_interval: int

    def __post_init__(self) -> None:
        if not 1 <= self.order <= 255:
            raise ValueError(f"order must be in [1, 255], got {self.order}")
        if not 1 <= self.window <= 65535:
            raise ValueError(f"window must be in [1, 65535], got {self.window}")
        if not 1 <= self.refit_interval <= 65535:
            raise ValueError(
                f"refit interval must be in [1, 65535], got {self.refit_interval}")

    @property
    def warmup(self) -> int:
        """Symbols needed before the first fit has a full window."""
        return self.order + self.window


def identity_coefficients(order: int) -> list[float]:
    """Fallback [1, 0, ..., 0]: predict the previous sample."""
    return [1.0] + [0.0] * (order - 1)


def _solve(a: list[list[float]], b: list[float]) -> list[float] | None:
    """Gaussian elimination with partial pivoting; None if singular."""
    n = len(b)
    scale = max((abs(v) for row in a for v in row), default=0.0)
    tol = 1e-10 * max(1.0, scale)
    m = [row[:] + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(m[r][col]))
        if abs(m[pivot][col]) <= tol:
            return None
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
        inv = 1.0 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f != 0.0:
                for c in range(col, n + 1):
                    m[r][c] -= f * m[col][c]
    out = [0.0] * n
    for col in range(n - 1, -1, -1):
        s = m[col][n]
        for c in range(col + 1, n):
            s -= m[col][c] * out[c]
        out[col] = s / m[col][col]
    return out


def fit(history: Sequence[int], cfg: LpcConfig, t: int,
        previous: list[float] | None = None) -> list[float]:
    """Least-squares coefficients from the window ending just before t.

    Solves the normal equations of predicting history[t-i] from
    history[t-i-1-j] over i = 1..window.  A singular window (constant
    zeros, say) keeps the previous coefficients, or the identity fallback
    when there are none.
    """
    order = cfg.order
    if t < cfg.warmup:
        raise ValueError(f"need at least {cfg.warmup} samples, have {t}")
    if t > len(history):
        raise ValueError("t runs past the available history")
    a = [[0.0] * order for _ in range(order)]
    b = [0.0] * order
    for i in range(1, cfg.window + 1):
        target = float(history[t - i])
        base = t - i - 1
        for j in range(order):
            xj = float(history[base - j])
            b[j] += target * xj
            for l in range(j, order):
                a[j][l] += xj * float(history[base - l])
    for j in range(order):
        for l in range(j):
            a[j][l] = a[l][j]
    coeffs = _solve(a, b)
    if coeffs is None:
        return list(previous) if previous is not None else identity_coefficients(order)
    return coeffs


def predict_at(history: Sequence[int], coeffs: Sequence[float], t: int) -> float:
    """Prediction for position t from the t samples before it."""
    if t < len(coeffs):
        raise ValueError("not enough history for the predictor order")
    s = 0.0
    for j, c in enumerate(coeffs):
        s += c * history[t - 1 - j]
    return s


def predict(history: Sequence[int], coeffs: Sequence[float]) -> float:
    """Prediction for the sample following ``history``."""
    return predict_at(history, coeffs, len(history))
