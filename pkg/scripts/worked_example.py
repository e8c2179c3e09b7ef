"""Two-period firm: five valuations, goodwill, and what an ESOP sellout is worth.

    python scripts/worked_example.py
"""

from fractions import Fraction

from fairval.ledger import SHARES, FirmBook, LedgerEvent, money, replay, sellout_incentive
from fairval.mm_engine import (
    FORMULAS,
    FirmPrimitives,
    build_trajectory,
    check_equivalence,
    goodwill,
    pure_profit_series,
)


def main() -> None:
    # earns 150 a year on NAV 1000 at r = 10%: pure profit 50 a year for two years
    p = FirmPrimitives(r=0.10, NAV0=1000.0, n0=100.0, A=(150.0, 150.0), I=(0.0, 0.0))
    traj = build_trajectory(p)

    print("t       NAV           V        v     shares    goodwill")
    for t in range(traj.T + 1):
        print(
            f"{t}  {traj.NAV[t]:9.2f}  {traj.V[t]:10.4f}  {traj.v[t]:7.4f}"
            f"  {traj.nshares[t]:9.4f}  {goodwill(traj, t):10.4f}"
        )
    print("pure profit per period:", ", ".join(f"{x:.2f}" for x in pure_profit_series(traj)))

    rep = check_equivalence(traj, 0)
    print("\nvaluations at t=0")
    for name in FORMULAS:
        print(f"  {name:<20} {rep.values[name]:.10f}")
    print(f"  max relative deviation {rep.max_rel_dev:.2e}")

    book = replay(
        FirmBook(denomination=SHARES, share_price=Fraction(10)),
        [
            LedgerEvent("Contribution", {"member_id": "a", "labor_weight": "5"}),
            LedgerEvent("Contribution", {"member_id": "b", "labor_weight": "3"}),
            LedgerEvent("Contribution", {"member_id": "c", "labor_weight": "2"}),
            LedgerEvent("EsopPrincipalAllocation", {"shares": 100}),
            LedgerEvent("MarkToNAV", {"company_nav": "1000.00"}),
        ],
    )
    inc = sellout_incentive(book, money(traj.V[0]))
    print(f"\nESOP holding all shares, NAV {book.nav}, market value {inc.market_value}")
    print("member  shares  at NAV  at market  gain")
    for k in inc.deltas:
        print(
            f"  {k}     {book.account(k).share_count:5d}  {inc.nav_payouts[k]:>6}"
            f"  {inc.market_payouts[k]:>9}  {inc.deltas[k]:>5}"
        )
    print(f"total gain {inc.aggregate_delta} vs goodwill {goodwill(traj, 0):.4f}")


if __name__ == "__main__":
    main()
