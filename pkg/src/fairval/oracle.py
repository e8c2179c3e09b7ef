"""Exact rational reference computations.

Every function here takes rationals (``Fraction``, ``int``, or a decimal
string such as ``"0.1"``) and returns a ``Fraction``. Nothing is shared with
the floating point engine: sums are written out term by term as plain
definitions so they can serve as an independent check on the engine.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Union[Fraction, int, str]


def q(x: Rational | float) -> Fraction:
    """Coerce to ``Fraction``; floats are converted exactly (bit for bit)."""
    return x if isinstance(x, Fraction) else Fraction(x)


def discount(r: Rational, k: int) -> Fraction:
    one_plus = 1 + q(r)
    return Fraction(1) / one_plus**k


def annuity(n: int, r: Rational) -> Fraction:
    return sum((discount(r, k) for k in range(1, n + 1)), Fraction(0))


def present_value(amounts: Iterable[Rational], r: Rational) -> Fraction:
    return sum(
        (q(a) * discount(r, k) for k, a in enumerate(amounts, start=1)),
        Fraction(0),
    )


def perpetuity_partial_sum(r: Rational, K: int) -> Fraction:
    rq = q(r)
    return sum((rq * discount(rq, k) for k in range(1, K + 1)), Fraction(0))


def asset_values(RK, S, n: int, r, PQ, VC, WL) -> dict[str, Fraction]:
    """Passive value, active value, pure profit and simple goodwill of one asset."""
    RK, S, PQ, VC, WL = map(q, (RK, S, PQ, VC, WL))
    a = annuity(n, r)
    salvage = S * discount(r, n)
    profit = PQ - RK - VC - WL
    return {
        "passive_value": RK * a + salvage,
        "active_value": (PQ - VC - WL) * a + salvage,
        "pure_profit": profit,
        "goodwill_simple": profit * a,
    }


def firm_value_nav_plus_goodwill(
    r: Rational,
    nav0: Rational,
    A: Sequence[Rational],
    I: Sequence[Rational],
    terminal: Rational | None = None,
    t: int = 0,
) -> Fraction:
    """``NAV[t]`` plus discounted pure profits, with terminal goodwill.

    ``terminal`` is the equity value at the horizon; ``None`` means it equals
    the horizon NAV (no pure profit after the horizon).
    """
    rq = q(r)
    nav = [q(nav0)]
    for inv in I:
        nav.append(nav[-1] + q(inv))
    T = len(A)
    v_T = nav[T] if terminal is None else q(terminal)
    gw = Fraction(0)
    for k in range(1, T - t + 1):
        s = t + k - 1
        gw += (q(A[s]) - rq * nav[s]) * discount(rq, k)
    gw += (v_T - nav[T]) * discount(rq, T - t)
    return nav[t] + gw


def firm_value_backward(
    r: Rational,
    nav0: Rational,
    A: Sequence[Rational],
    I: Sequence[Rational],
    terminal: Rational | None = None,
) -> list[Fraction]:
    """All ``V[t]`` from ``V[t] = (A[t] - I[t] + V[t+1]) / (1+r)``."""
    rq = q(r)
    nav_T = q(nav0) + sum((q(i) for i in I), Fraction(0))
    T = len(A)
    V = [Fraction(0)] * (T + 1)
    V[T] = nav_T if terminal is None else q(terminal)
    for s in range(T - 1, -1, -1):
        V[s] = (q(A[s]) - q(I[s]) + V[s + 1]) / (1 + rq)
    return V
