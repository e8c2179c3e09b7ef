"""Discounting primitives: discount factors, annuity factors, present values.

All functions are pure and work on a single flat per-period rate ``r``.
Payments are at the end of each period, so the first amount in a stream is
discounted once.
"""

from __future__ import annotations

import math
from typing import Sequence


class DomainError(ValueError):
    """Raised when a rate or period count is outside the valid domain."""


def _check_rate(r: float) -> None:
    if r <= -1:
        raise DomainError(f"rate must be > -1, got {r!r}")


def _check_positive_rate(r: float) -> None:
    if r <= 0:
        raise DomainError(f"rate must be > 0, got {r!r}")


def discount_factor(r: float, k: int) -> float:
    """Return ``1 / (1 + r)**k``."""
    _check_rate(r)
    if k < 0:
        raise DomainError(f"period index must be >= 0, got {k!r}")
    return (1 + r) ** -k


def annuity_pv(n: int, r: float) -> float:
    """Present value of an ordinary annuity of one, ``a(n, r)``.

    Parameters
    ----------
    n : int
        Number of end-of-period payments.
    r : float
        Per-period rate, ``r > -1``.

    Returns
    -------
    float
        ``sum(1/(1+r)**k for k in 1..n)``; ``n`` when ``r == 0``.

    Notes
    -----
    The closed form ``(1 - (1+r)**-n) / r`` is evaluated through ``expm1`` and
    ``log1p`` so that small rates do not lose digits to cancellation.
    """
    _check_rate(r)
    if n < 0:
        raise DomainError(f"period count must be >= 0, got {n!r}")
    if n == 0:
        return 0.0
    if r == 0:
        return float(n)
    return -math.expm1(-n * math.log1p(r)) / r


def present_value(amounts: Sequence[float], r: float) -> float:
    """Discount a finite stream whose k-th entry is paid at the end of period k."""
    _check_rate(r)
    d = 1 / (1 + r)
    total = 0.0
    factor = 1.0
    for amount in amounts:
        factor *= d
        total += amount * factor
    return total


def perpetuity_identity_residual(r: float, K: int) -> float:
    """Return ``1 - sum(r/(1+r)**k for k in 1..K)``.

    The partial sums of ``r/(1+r)**k`` tend to one, and the shortfall after
    ``K`` terms is ``(1+r)**-K``. The residual is accumulated term by term,
    so its absolute error stays near machine epsilon; its relative error
    grows once ``(1+r)**-K`` is far below epsilon.
    """
    _check_positive_rate(r)
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K!r}")
    residual = 1.0
    for k in range(1, K + 1):
        residual -= r * (1 + r) ** -k
    return residual
