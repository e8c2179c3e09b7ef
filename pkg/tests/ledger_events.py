"""Random, always-applicable event sequences for value-denominated books."""

from decimal import Decimal as D

from fairval.ledger import FirmBook, LedgerEvent, apply_event

def random_value_events(rng, n, on_apply=None):
    """A random but always-applicable event sequence on a value book.

    Returns the starting book and the events. ``on_apply(book)`` is called
    on the book after each event.
    """
    book = FirmBook(ica_interest_rate=D(rng.choice(["0", "0.03", "0.05"])))
    events = []
    for _ in range(n):
        active = [a.member_id for a in book.active_accounts]
        kind = rng.choice(["Contribution", "PatronageAllocation", "LossAllocation", "InterestCredit", "Withdrawal", "Exit"])
        cents = rng.randint(0, 500000)
        amount = str(D(cents) / 100)
        if kind == "Contribution" or not active:
            # existing members top up; a newcomer joins otherwise
            fresh = f"m{len(book.accounts):03d}"
            free = active + [fresh] if len(active) < 6 else active
            payload = {"member_id": rng.choice(free), "amount": amount, "labor_weight": str(rng.randint(1, 9))}
            kind = "Contribution"
        elif kind in ("PatronageAllocation", "LossAllocation"):
            payload = {"amount": amount, "weights": {m: rng.randint(0, 5) for m in active}}
            if not any(payload["weights"].values()):
                payload["weights"][active[0]] = 1
        elif kind == "Withdrawal":
            m = rng.choice(active)
            cap = max(D(0), book.account(m).balance)
            payload = {"member_id": m, "amount": str(min(cap, D(amount)))}
        elif kind == "Exit":
            payload = {"member_id": rng.choice(active), "rule": "nav"}
        else:
            payload = {}
        event = LedgerEvent(kind, payload)
        book, _ = apply_event(book, event)
        events.append(event)
        if on_apply is not None:
            on_apply(book)
    return FirmBook(ica_interest_rate=book.ica_interest_rate), events
