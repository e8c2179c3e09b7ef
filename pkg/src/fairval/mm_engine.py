"""Finite-horizon Miller-Modigliani firm valuation.

A firm is described by its accounting primitives (profit ``A``, net
investment ``I``, dividends ``Div``, depreciation, cost of goods sold, debt)
over ``T`` periods. :func:`build_trajectory` derives everything else: the NAV
path, total equity value by backward recursion, new share subscriptions,
share counts and per-share prices. The ``value_*`` functions then price the
firm five different ways, and :func:`check_equivalence` confirms they agree.

Infinite sums are replaced by a horizon ``T`` plus a terminal equity value
``V[T]``. Each valuation adds the discounted terminal term that stands in
for the tail of its sum, so the finite versions agree exactly (up to
rounding) whenever the infinite ones do.

Timing: ``A[t]``, ``I[t]``, ``Div[t]`` belong to the period that starts at
``t``; they are realised at ``t + 1`` and discounted once from ``t``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence, Union

from .fincore import DomainError


class InfeasibleTrajectory(ValueError):
    """The primitives imply a nonpositive share price or share count."""


@dataclass(frozen=True)
class ZeroGoodwill:
    """Close the horizon with ``V[T] = NAV[T]``: no pure profit after ``T``."""


@dataclass(frozen=True)
class ExplicitValue:
    value: float

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError(f"terminal value must be >= 0, got {self.value!r}")


TerminalCondition = Union[ZeroGoodwill, ExplicitValue]


@dataclass(frozen=True)
class BalanceSheet:
    GAV: float
    D: float
    NAV: float

    def __post_init__(self) -> None:
        if self.GAV != self.D + self.NAV:
            raise ValueError("balance sheet does not balance: GAV != D + NAV")

    @classmethod
    def from_nav(cls, nav: float, debt: float = 0.0) -> "BalanceSheet":
        return cls(GAV=debt + nav, D=debt, NAV=nav)


def _series(values: Sequence[float] | None, T: int, name: str) -> tuple:
    if values is None or len(values) == 0:
        return (0.0,) * T
    if len(values) != T:
        raise ValueError(f"{name} has length {len(values)}, expected {T}")
    return tuple(values)


@dataclass(frozen=True)
class FirmPrimitives:
    """Exogenous inputs to the firm model; ``T`` is ``len(A)``.

    Optional series default to zeros. ``Depr`` and ``COGS`` only enter the
    cash receipts and outlays; ``D`` only enters the balance sheet.
    """

    r: float
    NAV0: float
    n0: float
    A: tuple
    I: tuple
    Div: tuple = ()
    Depr: tuple = ()
    COGS: tuple = ()
    D: tuple = ()

    def __post_init__(self) -> None:
        if self.r <= 0:
            raise DomainError(f"rate must be > 0, got {self.r!r}")
        if self.n0 <= 0:
            raise ValueError(f"n0 must be > 0, got {self.n0!r}")
        T = len(self.A)
        if T < 1:
            raise ValueError("horizon T must be >= 1")
        object.__setattr__(self, "A", tuple(self.A))
        for name in ("I", "Div", "Depr", "COGS", "D"):
            object.__setattr__(self, name, _series(getattr(self, name), T, name))
        for name in ("Div", "Depr", "COGS", "D"):
            if any(x < 0 for x in getattr(self, name)):
                raise ValueError(f"{name} entries must be >= 0")
        nav = self.NAV0
        if nav <= 0:
            raise ValueError(f"NAV0 must be > 0, got {nav!r}")
        for t, inv in enumerate(self.I):
            nav = nav + inv
            if nav <= 0:
                raise ValueError(f"NAV becomes nonpositive at t={t + 1}")

    @property
    def T(self) -> int:
        return len(self.A)


@dataclass(frozen=True)
class FirmTrajectory:
    """A fully derived firm path. Series indexed by time ``t``.

    ``NAV``, ``V``, ``nshares``, ``v`` run over ``t = 0..T``. ``Sub`` and ``m``
    also have ``T + 1`` entries, with index 0 unused (always zero), so that
    ``Sub[t + 1]`` is the subscription raised at ``t + 1``. ``div_ps``,
    ``receipts``, ``outlays`` run over ``t = 0..T-1``.
    """

    primitives: FirmPrimitives
    terminal: TerminalCondition
    NAV: tuple
    V: tuple
    Sub: tuple
    m: tuple
    nshares: tuple
    v: tuple
    div_ps: tuple
    receipts: tuple
    outlays: tuple

    @property
    def T(self) -> int:
        return self.primitives.T

    @property
    def r(self) -> float:
        return self.primitives.r

    def balance_sheet(self, t: int) -> BalanceSheet:
        debt = self.primitives.D[t] if t < self.T else self.primitives.D[-1]
        return BalanceSheet.from_nav(self.NAV[t], debt)

    def discount(self, k: int) -> float:
        return (1 + self.r) ** -k


def nav_path(nav0: float, investment: Sequence[float]) -> tuple:
    return tuple(itertools.accumulate(investment, initial=nav0))


def build_trajectory(
    p: FirmPrimitives, terminal: TerminalCondition | None = None
) -> FirmTrajectory:
    """Derive the full firm path from its primitives.

    ``V`` comes from ``V[t] = (A[t] - I[t] + V[t+1]) / (1 + r)`` starting at
    the terminal value. Shares follow from the subscription equation
    ``Sub[t+1] = I[t] - (A[t] - Div[t])``: the old holders' shares are worth
    ``V[t+1] - Sub[t+1]`` at ``t + 1``, which fixes ``v[t+1]``, and the
    subscription buys ``m[t+1] = Sub[t+1] / v[t+1]`` new shares. A negative
    subscription is a pro-rata buyback at the same price.
    """
    terminal = ZeroGoodwill() if terminal is None else terminal
    T, r = p.T, p.r
    NAV = nav_path(p.NAV0, p.I)

    V = [0.0] * (T + 1)
    V[T] = NAV[T] if isinstance(terminal, ZeroGoodwill) else terminal.value
    for t in range(T - 1, -1, -1):
        V[t] = (p.A[t] - p.I[t] + V[t + 1]) / (1 + r)

    Sub = [0.0] * (T + 1)
    m = [0.0] * (T + 1)
    nshares = [0.0] * (T + 1)
    v = [0.0] * (T + 1)
    nshares[0] = p.n0
    v[0] = V[0] / p.n0
    if v[0] <= 0:
        raise InfeasibleTrajectory(f"share price v[0] = {v[0]!r} is not positive")
    for t in range(T):
        Sub[t + 1] = p.I[t] - (p.A[t] - p.Div[t])
        v[t + 1] = (V[t + 1] - Sub[t + 1]) / nshares[t]
        if v[t + 1] <= 0:
            raise InfeasibleTrajectory(
                f"share price v[{t + 1}] = {v[t + 1]!r} is not positive"
            )
        m[t + 1] = Sub[t + 1] / v[t + 1]
        nshares[t + 1] = nshares[t] + m[t + 1]
        if nshares[t + 1] <= 0:
            raise InfeasibleTrajectory(
                f"share count n[{t + 1}] = {nshares[t + 1]!r} is not positive"
            )

    div_ps = tuple(p.Div[t] / nshares[t] for t in range(T))
    receipts = tuple(p.A[t] + p.Depr[t] + p.COGS[t] for t in range(T))
    outlays = tuple(p.I[t] + p.Depr[t] + p.COGS[t] for t in range(T))
    return FirmTrajectory(
        primitives=p,
        terminal=terminal,
        NAV=NAV,
        V=tuple(V),
        Sub=tuple(Sub),
        m=tuple(m),
        nshares=tuple(nshares),
        v=tuple(v),
        div_ps=div_ps,
        receipts=receipts,
        outlays=outlays,
    )


def _check_t(traj: FirmTrajectory, t: int) -> None:
    if not 0 <= t <= traj.T:
        raise ValueError(f"t must be in [0, {traj.T}], got {t!r}")


def _discounted(traj: FirmTrajectory, flows: Sequence[float], t: int) -> float:
    """``sum(flows[t+k-1] / (1+r)**k for k in 1..T-t)``."""
    return sum(flows[t + k - 1] * traj.discount(k) for k in range(1, traj.T - t + 1))


def _terminal_pv(traj: FirmTrajectory, amount: float, t: int) -> float:
    return amount * traj.discount(traj.T - t)


def value_dividend_stream(traj: FirmTrajectory, t: int) -> float:
    """Discounted dividends on the shares of record at ``t``.

    Only the ``nshares[t]`` shares outstanding at ``t`` are counted; shares
    issued later are bought by new holders and add nothing to them. The
    terminal term is the horizon price on those same shares.
    """
    _check_t(traj, t)
    held = traj.nshares[t]
    return held * _discounted(traj, traj.div_ps, t) + _terminal_pv(
        traj, held * traj.v[traj.T], t
    )


def value_discounted_cashflow(traj: FirmTrajectory, t: int) -> float:
    _check_t(traj, t)
    net = [rec - out for rec, out in zip(traj.receipts, traj.outlays)]
    return _discounted(traj, net, t) + _terminal_pv(traj, traj.V[traj.T], t)


def value_earnings_recursion(traj: FirmTrajectory, t: int) -> float:
    """Closed form of the ``A - I`` recursion: discounted ``A - I`` plus terminal value."""
    _check_t(traj, t)
    p = traj.primitives
    net = [a - i for a, i in zip(p.A, p.I)]
    return _discounted(traj, net, t) + _terminal_pv(traj, traj.V[traj.T], t)


def pure_profit_series(traj: FirmTrajectory) -> tuple:
    """``A[t] - r * NAV[t]``: profit net of the interest cost of the capital."""
    p = traj.primitives
    return tuple(p.A[t] - p.r * traj.NAV[t] for t in range(traj.T))


def goodwill(traj: FirmTrajectory, t: int) -> float:
    """Discounted future pure profit at ``t``, plus goodwill left at the horizon."""
    _check_t(traj, t)
    pi = pure_profit_series(traj)
    terminal_gw = traj.V[traj.T] - traj.NAV[traj.T]
    return _discounted(traj, pi, t) + _terminal_pv(traj, terminal_gw, t)


def value_nav_plus_goodwill(traj: FirmTrajectory, t: int) -> float:
    return traj.NAV[t] + goodwill(traj, t)


def passive_nav_value(nav_t: float, r: float, K: int) -> float:
    """Value of lending out the net assets: ``K`` payments of ``r*NAV`` then the principal.

    Always equals ``nav_t``; the function computes the sum rather than
    returning its known result.
    """
    if r <= 0:
        raise DomainError(f"rate must be > 0, got {r!r}")
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K!r}")
    coupon = r * nav_t
    total = sum(coupon * (1 + r) ** -k for k in range(1, K + 1))
    return total + nav_t * (1 + r) ** -K


@dataclass(frozen=True)
class TelescopingCheck:
    """Term-by-term pieces of the goodwill double sum at one ``t``.

    ``lhs_terms[j]`` is the total weight the double sum (plus its share of
    the terminal correction) puts on ``dNAV[t+j]``, times that change;
    ``rhs_terms[j]`` is ``I[t+j] / (1+r)**(j+1)``.
    """

    double_sum: float
    terminal_correction: float
    investment_pv: float
    lhs_terms: tuple
    rhs_terms: tuple


def goodwill_telescoping(traj: FirmTrajectory, t: int) -> TelescopingCheck:
    """Evaluate the double sum ``sum_k r/(1+r)**k * sum_{j<=k-2} dNAV[t+j]`` directly.

    Over a finite horizon ``K = T - t`` the double sum falls short of the
    discounted investment by ``(NAV[T] - NAV[t]) / (1+r)**K``; that shortfall
    is the terminal correction.
    """
    _check_t(traj, t)
    r, K = traj.r, traj.T - t
    dnav = [traj.NAV[s + 1] - traj.NAV[s] for s in range(t, traj.T)]

    double_sum = 0.0
    for k in range(2, K + 1):
        inner = sum(dnav[j] for j in range(0, k - 1))
        double_sum += traj.discount(k) * r * inner
    correction = (traj.NAV[traj.T] - traj.NAV[t]) * traj.discount(K)

    lhs_terms = []
    for j in range(K):
        weight = sum(r * traj.discount(k) for k in range(j + 2, K + 1))
        lhs_terms.append(dnav[j] * (weight + traj.discount(K)))
    I = traj.primitives.I
    rhs_terms = tuple(I[t + j] * traj.discount(j + 1) for j in range(K))
    return TelescopingCheck(
        double_sum=double_sum,
        terminal_correction=correction,
        investment_pv=sum(rhs_terms),
        lhs_terms=tuple(lhs_terms),
        rhs_terms=rhs_terms,
    )


def arbitrage_residuals(traj: FirmTrajectory) -> tuple:
    """``r*v[t] - div_ps[t] - (v[t+1] - v[t])`` for each ``t < T``; zero under arbitrage."""
    r, v = traj.r, traj.v
    return tuple(r * v[t] - traj.div_ps[t] - (v[t + 1] - v[t]) for t in range(traj.T))


def rel_dev(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


FORMULAS = (
    "dividend_stream",
    "discounted_cashflow",
    "earnings_recursion",
    "nav_plus_goodwill",
    "backward_recursion",
)


@dataclass(frozen=True)
class EquivalenceReport:
    t: int
    values: dict
    max_rel_dev: float
    tol: float
    passed: bool


def check_equivalence(traj: FirmTrajectory, t: int, tol: float = 1e-9) -> EquivalenceReport:
    """Price the firm at ``t`` all five ways and compare them pairwise."""
    _check_t(traj, t)
    values = {
        "dividend_stream": value_dividend_stream(traj, t),
        "discounted_cashflow": value_discounted_cashflow(traj, t),
        "earnings_recursion": value_earnings_recursion(traj, t),
        "nav_plus_goodwill": value_nav_plus_goodwill(traj, t),
        "backward_recursion": traj.V[t],
    }
    dev = max(rel_dev(a, b) for a, b in itertools.combinations(values.values(), 2))
    return EquivalenceReport(t=t, values=values, max_rel_dev=dev, tol=tol, passed=dev <= tol)
