"""Internal capital accounts for ESOPs, worker cooperatives and partnerships.

A :class:`FirmBook` is an immutable snapshot; every operation returns a new
book. Amounts are ``Decimal`` multiples of one cent. Splits across members
use the largest-remainder method on whole cents (or whole shares) with ties
broken by ascending member id, so allocated pieces always add up exactly.

Two kinds of book are supported.

Value-denominated (cooperative, partnership, value-ICA ESOP)
    Each account holds a money balance. ``nav == sum(balances) + collective``
    after every operation.

Share-denominated (conventional ESOP)
    Each account holds a share count. ``share_price`` is the price at which
    the plan carries its shares, ``nav`` is the net-asset-value backing of
    those shares, and ``collective`` holds the difference:
    ``total_shares * share_price == nav + collective``. Revaluing the shares
    above NAV builds up the collective; marking them back to NAV debits it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Mapping, Union

CENT = Decimal("0.01")
VALUE = "value"
SHARES = "shares"


class LedgerError(Exception):
    pass


class DuplicateMember(LedgerError):
    pass


class UnknownMember(LedgerError):
    pass


class InactiveMember(LedgerError):
    pass


class NoActiveMembers(LedgerError):
    pass


def money(x) -> Decimal:
    """Round to the cent, half away from zero. Floats go through ``repr``."""
    if isinstance(x, Fraction):
        x = Decimal(x.numerator) / Decimal(x.denominator)
    elif isinstance(x, float):
        x = Decimal(repr(x))
    else:
        x = Decimal(x)
    return x.quantize(CENT, rounding=ROUND_HALF_UP)


def to_cents(x: Decimal) -> int:
    return int(money(x) / CENT)


def from_cents(c: int) -> Decimal:
    return (Decimal(c) * CENT).quantize(CENT)


def largest_remainder(total: int, weights: Mapping[str, object]) -> dict[str, int]:
    """Split the integer ``total`` in proportion to ``weights``.

    Each member gets the floor of its exact quota; the units left over go to
    the largest fractional parts, ties to the smaller member id.
    """
    if total < 0:
        raise ValueError("total must be >= 0")
    w = {k: Fraction(str(v)) if isinstance(v, float) else Fraction(v) for k, v in weights.items()}
    if any(x < 0 for x in w.values()):
        raise ValueError("weights must be >= 0")
    W = sum(w.values(), Fraction(0))
    if W == 0:
        raise NoActiveMembers("weights sum to zero")
    quotas = {k: total * x / W for k, x in w.items()}
    out = {k: int(qk) for k, qk in quotas.items()}  # floor: quotas are >= 0
    left = total - sum(out.values())
    order = sorted(quotas, key=lambda k: (-(quotas[k] - out[k]), k))
    for k in order[:left]:
        out[k] += 1
    return out


@dataclass(frozen=True)
class MemberAccount:
    member_id: str
    denomination: str = VALUE
    balance: Decimal = Decimal("0.00")
    share_count: int = 0
    labor_weight: Decimal = Decimal("0")
    active: bool = True


@dataclass(frozen=True)
class NAVRule:
    pass


@dataclass(frozen=True)
class MarketRule:
    market_value: Decimal


ExitRule = Union[NAVRule, MarketRule]


@dataclass(frozen=True)
class FirmBook:
    denomination: str = VALUE
    nav: Decimal = Decimal("0.00")
    collective: Decimal = Decimal("0.00")
    accounts: tuple = ()
    share_price: Fraction = Fraction(0)
    total_shares: int = 0
    ica_interest_rate: Decimal = Decimal("0")

    def __post_init__(self) -> None:
        if self.denomination not in (VALUE, SHARES):
            raise ValueError(f"unknown denomination {self.denomination!r}")
        object.__setattr__(self, "nav", money(self.nav))
        object.__setattr__(self, "collective", money(self.collective))
        object.__setattr__(self, "share_price", Fraction(self.share_price))
        object.__setattr__(
            self, "accounts", tuple(sorted(self.accounts, key=lambda a: a.member_id))
        )

    # -- lookups ---------------------------------------------------------

    def account(self, member_id: str) -> MemberAccount:
        for acct in self.accounts:
            if acct.member_id == member_id:
                return acct
        raise UnknownMember(member_id)

    def has(self, member_id: str) -> bool:
        return any(a.member_id == member_id for a in self.accounts)

    @property
    def active_accounts(self) -> tuple:
        return tuple(a for a in self.accounts if a.active)

    @property
    def balance_total(self) -> Decimal:
        return sum((a.balance for a in self.accounts), Decimal("0.00"))

    @property
    def carrying_value(self) -> Decimal:
        """Shares at the carrying price (share books)."""
        return money(self.total_shares * self.share_price)

    @property
    def nav_per_share(self) -> Fraction:
        if self.total_shares == 0:
            return Fraction(0)
        return Fraction(self.nav) / self.total_shares

    def is_conserved(self) -> bool:
        if self.denomination == VALUE:
            return self.balance_total + self.collective == self.nav
        shares = sum(a.share_count for a in self.accounts)
        return shares == self.total_shares and self.carrying_value == self.nav + self.collective

    def flags(self) -> list[str]:
        """Conditions that are allowed but worth reporting."""
        out = [f"negative balance: {a.member_id}" for a in self.accounts if a.balance < 0]
        if self.collective < 0:
            out.append("negative collective account")
        return out

    # -- persistence -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "denomination": self.denomination,
            "nav": str(self.nav),
            "collective": str(self.collective),
            "share_price": str(self.share_price),
            "total_shares": self.total_shares,
            "ica_interest_rate": str(self.ica_interest_rate),
            "accounts": [
                {
                    "member_id": a.member_id,
                    "denomination": a.denomination,
                    "balance": str(a.balance),
                    "share_count": a.share_count,
                    "labor_weight": str(a.labor_weight),
                    "active": a.active,
                }
                for a in self.accounts
            ],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "FirmBook":
        denomination = d.get("denomination", VALUE)
        accounts = tuple(
            MemberAccount(
                member_id=str(a["member_id"]),
                denomination=a.get("denomination", denomination),
                balance=money(a.get("balance", "0")),
                share_count=int(a.get("share_count", 0)),
                labor_weight=Decimal(str(a.get("labor_weight", "0"))),
                active=bool(a.get("active", True)),
            )
            for a in d.get("accounts", ())
        )
        return cls(
            denomination=denomination,
            nav=money(d.get("nav", "0")),
            collective=money(d.get("collective", "0")),
            accounts=accounts,
            share_price=Fraction(str(d.get("share_price", "0"))),
            total_shares=int(d.get("total_shares", 0)),
            ica_interest_rate=Decimal(str(d.get("ica_interest_rate", "0"))),
        )

    def canonical(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _put(book: FirmBook, acct: MemberAccount, **changes) -> FirmBook:
    others = [a for a in book.accounts if a.member_id != acct.member_id]
    return replace(book, accounts=tuple(others) + (acct,), **changes)


def _require_value_book(book: FirmBook, op: str) -> None:
    if book.denomination != VALUE:
        raise LedgerError(f"{op} requires a value-denominated book")


def _require_share_book(book: FirmBook, op: str) -> None:
    if book.denomination != SHARES:
        raise LedgerError(f"{op} requires a share-denominated book")


def _weights(book: FirmBook, weights: Mapping[str, object] | None) -> dict:
    if weights is None:
        return {a.member_id: a.labor_weight for a in book.active_accounts}
    for member_id, w in weights.items():
        acct = book.account(member_id)
        if not acct.active and w:
            raise InactiveMember(member_id)
    return dict(weights)


# -- value-denominated operations ---------------------------------------------


def open_account(
    book: FirmBook, member_id: str, initial_contribution=0, labor_weight=0
) -> FirmBook:
    """Admit a member; the contribution is credited to the new account and to NAV."""
    if book.has(member_id):
        raise DuplicateMember(member_id)
    amount = money(initial_contribution)
    if amount < 0:
        raise ValueError("contribution must be >= 0")
    if book.denomination == SHARES and amount != 0:
        raise LedgerError("share-denominated accounts are opened empty")
    acct = MemberAccount(
        member_id=member_id,
        denomination=book.denomination,
        balance=amount if book.denomination == VALUE else Decimal("0.00"),
        labor_weight=Decimal(str(labor_weight)),
    )
    return _put(book, acct, nav=book.nav + amount)


def contribute(book: FirmBook, member_id: str, amount) -> FirmBook:
    _require_value_book(book, "contribute")
    amount = money(amount)
    if amount < 0:
        raise ValueError("contribution must be >= 0")
    acct = book.account(member_id)
    if not acct.active:
        raise InactiveMember(member_id)
    return _put(book, replace(acct, balance=acct.balance + amount), nav=book.nav + amount)


def withdraw(book: FirmBook, member_id: str, amount) -> FirmBook:
    _require_value_book(book, "withdraw")
    amount = money(amount)
    acct = book.account(member_id)
    if amount < 0:
        raise ValueError("withdrawal must be >= 0")
    if amount > max(acct.balance, Decimal(0)):
        raise LedgerError(f"withdrawal {amount} exceeds balance {acct.balance} of {member_id}")
    return _put(book, replace(acct, balance=acct.balance - amount), nav=book.nav - amount)


def _spread(book: FirmBook, amount: Decimal, weights, sign: int) -> FirmBook:
    if amount == 0:
        return book
    split = largest_remainder(to_cents(amount), _weights(book, weights))
    accounts = []
    for acct in book.accounts:
        cents = split.get(acct.member_id, 0)
        if cents:
            acct = replace(acct, balance=acct.balance + sign * from_cents(cents))
        accounts.append(acct)
    return replace(book, accounts=tuple(accounts), nav=book.nav + sign * amount)


def allocate_patronage(book: FirmBook, retained_profit, weights=None) -> FirmBook:
    """Credit retained profit to the accounts in proportion to patronage.

    ``weights`` maps member id to labor weight; the accounts' own
    ``labor_weight`` of active members is used when it is omitted.
    """
    _require_value_book(book, "allocate_patronage")
    amount = money(retained_profit)
    if amount < 0:
        raise ValueError("retained profit must be >= 0; use allocate_loss")
    return _spread(book, amount, weights, +1)


def allocate_loss(book: FirmBook, loss, weights=None) -> FirmBook:
    """Debit a loss by patronage share. Balances may go negative (see ``flags``)."""
    _require_value_book(book, "allocate_loss")
    amount = money(loss)
    if amount < 0:
        raise ValueError("loss must be >= 0")
    return _spread(book, amount, weights, -1)


def credit_interest(book: FirmBook) -> FirmBook:
    """Grow every balance by the ICA rate, funded out of the collective account."""
    _require_value_book(book, "credit_interest")
    rate = book.ica_interest_rate
    if rate < 0:
        raise ValueError("ICA interest rate must be >= 0")
    if rate == 0:
        return book
    credited = Decimal("0.00")
    accounts = []
    for acct in book.accounts:
        new = money(acct.balance * (1 + rate))
        credited += new - acct.balance
        accounts.append(replace(acct, balance=new))
    return replace(book, accounts=tuple(accounts), collective=book.collective - credited)


# -- share-denominated operations ---------------------------------------------


def esop_principal_allocation(book: FirmBook, paid_shares: int, weights=None) -> FirmBook:
    """Release shares paid for by a loan principal payment, split by labor.

    The released shares join the plan at the current NAV per share (the
    carrying price if the plan holds no shares yet); the collective absorbs
    any gap between carrying price and NAV.
    """
    _require_share_book(book, "esop_principal_allocation")
    if paid_shares < 0:
        raise ValueError("paid_shares must be >= 0")
    if paid_shares == 0:
        return book
    split = largest_remainder(paid_shares, _weights(book, weights))
    backing = book.nav_per_share if book.total_shares else book.share_price
    accounts = tuple(
        replace(a, share_count=a.share_count + split.get(a.member_id, 0)) for a in book.accounts
    )
    total = book.total_shares + paid_shares
    nav = book.nav + money(paid_shares * backing)
    carrying = money(total * book.share_price)
    return replace(
        book, accounts=accounts, total_shares=total, nav=nav, collective=carrying - nav
    )


@dataclass(frozen=True)
class RevaluationReport:
    old_price: Fraction
    new_price: Fraction
    changes: dict = field(default_factory=dict)
    book: FirmBook | None = None


def revalue_shares(book: FirmBook, new_price) -> RevaluationReport:
    """Reprice the plan's shares; each account gains ``share_count * change``.

    Gains follow shares held, whatever the members' labor weights. NAV is
    untouched, so the whole revaluation lands in the collective account.
    """
    _require_share_book(book, "revalue_shares")
    new_price = Fraction(str(new_price)) if isinstance(new_price, float) else Fraction(new_price)
    if new_price < 0:
        raise ValueError("price must be >= 0")
    delta = new_price - book.share_price
    changes = {a.member_id: money(a.share_count * delta) for a in book.accounts}
    carrying = money(book.total_shares * new_price)
    new_book = replace(book, share_price=new_price, collective=carrying - book.nav)
    return RevaluationReport(book.share_price, new_price, changes, new_book)


def mark_to_nav(book: FirmBook, company_nav) -> FirmBook:
    """Set the carrying price to NAV per share; the write-down comes out of the collective."""
    _require_share_book(book, "mark_to_nav")
    if book.total_shares <= 0:
        raise LedgerError("mark_to_nav needs total_shares > 0")
    nav = money(company_nav)
    price = Fraction(nav) / book.total_shares
    carrying = money(book.total_shares * price)
    return replace(book, share_price=price, nav=nav, collective=carrying - nav)


# -- exits -------------------------------------------------------------------


def _payout(book: FirmBook, acct: MemberAccount, rule: ExitRule) -> Decimal:
    if book.denomination == SHARES:
        if book.total_shares == 0:
            return Decimal("0.00")
        if isinstance(rule, MarketRule):
            per_share = Fraction(money(rule.market_value)) / book.total_shares
        else:
            per_share = book.nav_per_share
        return money(acct.share_count * per_share)
    if isinstance(rule, MarketRule):
        # diagnostic only: market-scaling a value-denominated ICA
        if book.nav == 0:
            return acct.balance
        return money(Fraction(acct.balance) * Fraction(money(rule.market_value)) / Fraction(book.nav))
    return acct.balance


def exit_payout(book: FirmBook, member_id: str, rule: ExitRule | None = None):
    """Pay out and deactivate a departing member; returns ``(book, payout)``.

    Under :class:`NAVRule` a member leaves with the account balance, or the
    NAV value of their shares, and nothing for goodwill. Under
    :class:`MarketRule` the payout is the member's slice of the market value;
    any excess over the member's NAV claim is charged to the collective.
    Repurchased shares are retired.
    """
    rule = NAVRule() if rule is None else rule
    acct = book.account(member_id)
    if not acct.active:
        raise InactiveMember(member_id)
    payout = _payout(book, acct, rule)
    gone = replace(acct, balance=Decimal("0.00"), share_count=0, active=False)
    nav = book.nav - payout
    if book.denomination == VALUE:
        collective = book.collective - (payout - acct.balance)
        return _put(book, gone, nav=nav, collective=collective), payout
    total = book.total_shares - acct.share_count
    carrying = money(total * book.share_price)
    return (
        _put(book, gone, nav=nav, total_shares=total, collective=carrying - nav),
        payout,
    )


def repurchase_liability(book: FirmBook, rule: ExitRule | None = None) -> Decimal:
    """What it would cost to buy out every active member at once under ``rule``."""
    rule = NAVRule() if rule is None else rule
    return sum((_payout(book, a, rule) for a in book.active_accounts), Decimal("0.00"))


@dataclass(frozen=True)
class IncentiveReport:
    market_value: Decimal
    nav: Decimal
    nav_payouts: dict
    market_payouts: dict
    deltas: dict
    aggregate_delta: Decimal
    note: str = ""


def sellout_incentive(book: FirmBook, market_value) -> IncentiveReport:
    """Gain to each current member from selling out at market rather than exiting at NAV."""
    market_value = money(market_value)
    if market_value < 0:
        raise ValueError("market value must be >= 0")
    rule = MarketRule(market_value)
    nav_pay = {a.member_id: _payout(book, a, NAVRule()) for a in book.active_accounts}
    mkt_pay = {a.member_id: _payout(book, a, rule) for a in book.active_accounts}
    deltas = {k: mkt_pay[k] - nav_pay[k] for k in nav_pay}
    note = ""
    if book.denomination == VALUE:
        note = "market rule on value-denominated accounts is a diagnostic, not a payout basis"
    return IncentiveReport(
        market_value=market_value,
        nav=book.nav,
        nav_payouts=nav_pay,
        market_payouts=mkt_pay,
        deltas=deltas,
        aggregate_delta=sum(deltas.values(), Decimal("0.00")),
        note=note,
    )


# -- events ------------------------------------------------------------------

EVENT_KINDS = (
    "Contribution",
    "PatronageAllocation",
    "LossAllocation",
    "InterestCredit",
    "Withdrawal",
    "EsopPrincipalAllocation",
    "ShareRevaluation",
    "MarkToNAV",
    "Exit",
)


@dataclass(frozen=True)
class LedgerEvent:
    """One ledger entry. ``payload`` holds JSON-ready values (money as strings)."""

    kind: str
    payload: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")


def _rule_from_payload(payload: Mapping) -> ExitRule:
    rule = payload.get("rule", "nav")
    if rule == "nav":
        return NAVRule()
    if rule == "market":
        return MarketRule(money(payload["market_value"]))
    raise ValueError(f"unknown exit rule {rule!r}")


def apply_event(book: FirmBook, event: LedgerEvent):
    """Apply one event; returns ``(book, detail)``.

    ``detail`` is the payout for exits, the revaluation report for share
    revaluations, and ``None`` otherwise. A contribution from an unknown
    member opens their account.
    """
    p = event.payload
    kind = event.kind
    if kind == "Contribution":
        if book.has(p["member_id"]):
            return contribute(book, p["member_id"], p.get("amount", "0")), None
        return (
            open_account(book, p["member_id"], p.get("amount", "0"), p.get("labor_weight", "0")),
            None,
        )
    if kind == "PatronageAllocation":
        return allocate_patronage(book, p["amount"], p.get("weights")), None
    if kind == "LossAllocation":
        return allocate_loss(book, p["amount"], p.get("weights")), None
    if kind == "InterestCredit":
        return credit_interest(book), None
    if kind == "Withdrawal":
        return withdraw(book, p["member_id"], p["amount"]), None
    if kind == "EsopPrincipalAllocation":
        return esop_principal_allocation(book, int(p["shares"]), p.get("weights")), None
    if kind == "ShareRevaluation":
        report = revalue_shares(book, Fraction(str(p["price"])))
        return report.book, report
    if kind == "MarkToNAV":
        return mark_to_nav(book, p["company_nav"]), None
    if kind == "Exit":
        return exit_payout(book, p["member_id"], _rule_from_payload(p))
    raise AssertionError(kind)  # unreachable: kinds are validated on construction


def replay(book: FirmBook, events: Iterable[LedgerEvent]) -> FirmBook:
    for event in events:
        book, _ = apply_event(book, event)
    return book


def dump_events(events: Iterable[LedgerEvent]) -> str:
    """Serialize events as JSON Lines, numbered from 1."""
    lines = [
        json.dumps(
            {"seq": seq, "kind": e.kind, "payload": e.payload},
            sort_keys=True,
            separators=(",", ":"),
        )
        for seq, e in enumerate(events, start=1)
    ]
    return "".join(line + "\n" for line in lines)


def load_events(text: str) -> list[LedgerEvent]:
    events = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        rec = json.loads(line)
        if rec.get("seq") != len(events) + 1:
            raise ValueError(f"line {lineno}: expected seq {len(events) + 1}, got {rec.get('seq')!r}")
        events.append(LedgerEvent(rec["kind"], rec.get("payload", {})))
    return events
