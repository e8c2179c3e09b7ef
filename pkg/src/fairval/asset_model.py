"""Single-machine valuation: rented out (passive) versus run as a going concern (active)."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .fincore import annuity_pv, discount_factor


@dataclass(frozen=True)
class AssetSpec:
    """One capital asset and the operation built around it.

    C: market cost; K: capital services per year; R: rental per unit of K;
    S: salvage value; n: lifetime in years; P: output price; Q: output per
    year; VC: variable cost per year; W: wage rate; L: labor hired.
    """

    C: float = 0.0
    K: float = 0.0
    R: float = 0.0
    S: float = 0.0
    n: int = 1
    P: float = 0.0
    Q: float = 0.0
    VC: float = 0.0
    W: float = 0.0
    L: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n!r}")
        for name in ("K", "Q", "L", "C", "S"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    @property
    def rental_income(self) -> float:
        return self.R * self.K

    @property
    def revenue(self) -> float:
        return self.P * self.Q

    @property
    def wage_bill(self) -> float:
        return self.W * self.L


@dataclass(frozen=True)
class AssetValuation:
    passive_value: float
    active_value: float
    pure_profit_per_year: float
    goodwill_simple: float
    # C - passive_value; zero when the buy and lease markets are in arbitrage
    arbitrage_gap: float


def passive_value(a: AssetSpec, r: float) -> float:
    """Rental stream ``RK`` for ``n`` years plus discounted salvage."""
    return a.rental_income * annuity_pv(a.n, r) + a.S * discount_factor(r, a.n)


def pure_profit(a: AssetSpec) -> float:
    """Yearly economic profit ``PQ - RK - VC - WL``.

    ``RK`` is charged as the implicit cost of tying the asset up in the
    operation, so a positive result is profit over and above the rental
    alternative.
    """
    return a.revenue - a.rental_income - a.VC - a.wage_bill


def active_value(a: AssetSpec, r: float) -> float:
    """Discounted net cashflow ``PQ - VC - WL`` for ``n`` years plus salvage."""
    net = a.revenue - a.VC - a.wage_bill
    return net * annuity_pv(a.n, r) + a.S * discount_factor(r, a.n)


def decompose(a: AssetSpec, r: float) -> AssetValuation:
    """Split the going-concern value into the asset's own value plus goodwill.

    ``goodwill_simple`` is the discounted pure profit. When ``a.C`` equals the
    passive value the result satisfies ``active_value == C + goodwill_simple``;
    any disagreement between ``C`` and the passive value is reported in
    ``arbitrage_gap`` rather than raised.
    """
    pv = passive_value(a, r)
    profit = pure_profit(a)
    return AssetValuation(
        passive_value=pv,
        active_value=active_value(a, r),
        pure_profit_per_year=profit,
        goodwill_simple=profit * annuity_pv(a.n, r),
        arbitrage_gap=a.C - pv,
    )


def with_arbitrage_cost(a: AssetSpec, r: float) -> AssetSpec:
    """Copy of ``a`` whose market cost ``C`` is set to its passive value."""
    return replace(a, C=passive_value(a, r))
