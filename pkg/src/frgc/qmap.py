"""Exact integer arithmetic for residuals of grid-rounded predictions.

A real-valued prediction ``xhat`` is rounded to the nearest point of the
grid ``(rho/tau) * Z`` (ties round up), giving a quantized prediction held
as an integer numerator over ``tau``.  The residual ``x - [xhat]`` then
lives on a shifted ``1/tau`` lattice and is folded onto the non-negative
integers by ``map_residual`` so a Golomb coder can handle it.  Everything
past the single rounding step is integer arithmetic: floor/ceil divisions
are mathematical (toward minus/plus infinity), never truncations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SYMBOL_MIN = -(1 << 31)
SYMBOL_MAX = (1 << 31) - 1


def floordiv(a: int, b: int) -> int:
    """Quotient rounded toward minus infinity (Python's native //)."""
    return a // b


def ceildiv(a: int, b: int) -> int:
    """Quotient rounded toward plus infinity.

    >>> ceildiv(6, 4), ceildiv(-6, 4), ceildiv(8, 4)
    (2, -1, 2)
    """
    return -((-a) // b)


@dataclass(frozen=True)
class Precision:
    """Prediction rounding grid with step ``rho/tau``.

    ``rho = tau = 1`` is plain integer rounding; smaller ratios keep more
    of the prediction.  ``Precision(0, 1)`` (module constant ``ASYMPTOTIC``)
    stands for the limit of an ever finer grid: the analysis formulas accept
    it, the codec rejects it.
    """

    rho: int
    tau: int

    def __post_init__(self) -> None:
        if self.rho == 0:
            if self.tau != 1:
                raise ValueError("asymptotic precision is Precision(0, 1)")
            return
        if not 1 <= self.rho <= self.tau:
            raise ValueError(f"need 1 <= rho <= tau, got {self.rho}/{self.tau}")

    @property
    def is_asymptotic(self) -> bool:
        return self.rho == 0

    @property
    def half_shift(self) -> float:
        """Half a grid step, rho/(2*tau); 0.0 in the asymptotic limit."""
        if self.rho == 0:
            return 0.0
        return self.rho / (2.0 * self.tau)

    def __str__(self) -> str:
        return "0" if self.rho == 0 else f"{self.rho}/{self.tau}"


ASYMPTOTIC = Precision(0, 1)


@dataclass(frozen=True)
class QuantizedPrediction:
    """A grid point ``numerator/tau``; numerator is always a multiple of rho."""

    numerator: int
    tau: int

    @property
    def value(self) -> float:
        return self.numerator / self.tau


@dataclass(frozen=True)
class ResidualNumerator:
    """The exact residual ``x - [xhat]`` scaled by tau: value = tau*x - numerator."""

    value: int
    tau: int


def round_prediction(xhat: float, precision: Precision) -> QuantizedPrediction:
    """Round ``xhat`` to the nearest rho/tau grid point, ties toward +inf.

    The one floating-point operation in the pipeline; everything downstream
    is exact.

    >>> round_prediction(0.70, Precision(1, 4)).numerator
    3
    >>> round_prediction(0.625, Precision(1, 4)).numerator   # tie rounds up
    3
    >>> round_prediction(-0.625, Precision(1, 4)).numerator
    -2
    """
    if precision.is_asymptotic:
        raise ValueError("a finite precision is required to quantize")
    if not math.isfinite(xhat):
        raise ValueError(f"prediction must be finite, got {xhat!r}")
    k = math.floor(precision.tau * xhat / precision.rho + 0.5)
    return QuantizedPrediction(precision.rho * k, precision.tau)


def residual(x: int, q: QuantizedPrediction) -> ResidualNumerator:
    """Exact residual of symbol ``x`` against the quantized prediction.

    >>> residual(1, QuantizedPrediction(3, 4)).value
    1
    >>> residual(0, QuantizedPrediction(3, 4)).value
    -3
    """
    if not SYMBOL_MIN <= x <= SYMBOL_MAX:
        raise OverflowError(f"symbol {x} outside signed 32-bit range")
    return ResidualNumerator(q.tau * x - q.numerator, q.tau)


def map_residual(e: ResidualNumerator) -> int:
    """Fold the lattice residual onto 0, 1, 2, ... by magnitude.

    With ebar = value/tau this is floor(2*ebar) for ebar >= 0 and
    -floor(2*ebar) - 1 otherwise, computed without leaving the integers.

    >>> [map_residual(ResidualNumerator(r, 4)) for r in (1, -3, 5, -7)]
    [0, 1, 2, 3]
    >>> [map_residual(ResidualNumerator(r, 1)) for r in (0, -1, 1, -2)]
    [0, 1, 2, 3]
    """
    two_r = 2 * e.value
    if e.value >= 0:
        return two_r // e.tau
    return -(two_r // e.tau) - 1


def gamma_delta(e: ResidualNumerator) -> tuple[int, int]:
    """Split the residual numerator as value = gamma*tau + delta, 0 <= delta < tau.

    >>> gamma_delta(ResidualNumerator(-3, 4))
    (-1, 1)
    """
    return divmod(e.value, e.tau)


def map_by_cases(gamma: int, delta: int, tau: int) -> int:
    """Case-split form of the fold; independent route used as a test oracle.

    Lattice points closer than half a unit to their integer part (delta
    below tau/2) land on even/odd codes 2g / -2g-1; the far half lands one
    slot later.
    """
    if not 0 <= delta < tau:
        raise ValueError(f"need 0 <= delta < tau, got delta={delta}, tau={tau}")
    if 2 * delta < tau:
        return 2 * gamma if gamma >= 0 else -2 * gamma - 1
    return 2 * gamma + 1 if gamma >= 0 else -2 * gamma - 2


def ceil_twice_prediction(q: QuantizedPrediction) -> int:
    """ceil(2 * [xhat]), the decoder's parity anchor.

    >>> ceil_twice_prediction(QuantizedPrediction(3, 4))
    2
    """
    return ceildiv(2 * q.numerator, q.tau)


def unmap(m_value: int, q: QuantizedPrediction) -> int:
    """Invert map_residual given the same quantized prediction.

    The fold leaves exactly one integer consistent with each code: parity
    of ``m_value + ceil(2*[xhat])`` says which side of the prediction the
    symbol sat on.

    >>> q = QuantizedPrediction(3, 4)
    >>> [unmap(m, q) for m in (0, 1, 2, 3)]
    [1, 0, 2, -1]
    """
    if m_value < 0:
        raise ValueError(f"mapped residual must be non-negative, got {m_value}")
    c = ceil_twice_prediction(q)
    s = m_value + c
    if s % 2 == 0:
        return s // 2
    return (c - m_value - 1) // 2
