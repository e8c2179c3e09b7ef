"""Command-line runner: ``fairval --scenario FILE --out DIR``.

Exit status is 0 on success, 1 when an engine invariant or the five-formula
equivalence fails, and 2 on bad input (unreadable, malformed or invalid
scenario, infeasible firm, rejected ledger event).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from decimal import Decimal
from pathlib import Path

from . import __version__
from .asset_model import AssetSpec, decompose
from .fincore import DomainError, annuity_pv
from .fuzz import FuzzConfig, fuzz_equivalence
from .ledger import (
    FirmBook,
    LedgerError,
    LedgerEvent,
    MarketRule,
    NAVRule,
    apply_event,
    dump_events,
    money,
    repurchase_liability,
    sellout_incentive,
)
from .mm_engine import (
    FORMULAS,
    ExplicitValue,
    FirmPrimitives,
    InfeasibleTrajectory,
    ZeroGoodwill,
    build_trajectory,
    check_equivalence,
    goodwill,
    pure_profit_series,
    rel_dev,
)
from .report import Table, render_human, write_report
from .scenario import ParseError, Scenario, ValidationError, load_scenario

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT = 0, 1, 2


@dataclass
class RunResult:
    tables: list
    params: dict
    failed: bool
    extra_files: dict = field(default_factory=dict)


def run_asset(sc: Scenario, tol: float) -> RunResult:
    fields = {k: (v if k == "n" else float(v)) for k, v in sc.params["asset"].items()}
    spec = AssetSpec(**fields)
    r = sc.params["r"]
    val = decompose(spec, r)
    cols = {
        "passive_value": "asset_model.passive_value",
        "active_value": "asset_model.active_value",
        "pure_profit": "asset_model.pure_profit",
        "goodwill_simple": "asset_model.decompose",
        "arbitrage_gap": "asset_model.decompose",
        "annuity_factor": "fincore.annuity_pv",
    }
    table = Table("valuation", list(cols), cols)
    table.add(
        val.passive_value,
        val.active_value,
        val.pure_profit_per_year,
        val.goodwill_simple,
        val.arbitrage_gap,
        annuity_pv(spec.n, r),
    )
    failed = rel_dev(val.active_value, val.passive_value + val.goodwill_simple) > tol
    return RunResult([table], {"r": r, "asset": asdict(spec)}, failed)


def _primitives(params: dict) -> tuple[FirmPrimitives, object]:
    floats = lambda xs: tuple(float(x) for x in xs)  # noqa: E731
    p = FirmPrimitives(
        r=float(params["r"]),
        NAV0=float(params["NAV0"]),
        n0=float(params["n0"]),
        A=floats(params["A"]),
        I=floats(params["I"]),
        Div=floats(params.get("Div", ())),
        Depr=floats(params.get("Depr", ())),
        COGS=floats(params.get("COGS", ())),
        D=floats(params.get("D", ())),
    )
    term = params.get("terminal", {"type": "zero_goodwill"})
    terminal = ExplicitValue(float(term["value"])) if term["type"] == "explicit" else ZeroGoodwill()
    return p, terminal


def run_mm_trajectory(sc: Scenario, tol: float) -> RunResult:
    p, terminal = _primitives(sc.params)
    traj = build_trajectory(p, terminal)
    pi = pure_profit_series(traj)

    tcols = {
        "t": "index",
        "NAV": "mm_engine.build_trajectory",
        "V": "mm_engine.build_trajectory",
        "v": "mm_engine.build_trajectory",
        "nshares": "mm_engine.build_trajectory",
        "Sub": "mm_engine.build_trajectory",
        "m": "mm_engine.build_trajectory",
        "div_ps": "mm_engine.build_trajectory",
        "receipts": "mm_engine.build_trajectory",
        "outlays": "mm_engine.build_trajectory",
        "pure_profit": "mm_engine.pure_profit_series",
        "goodwill": "mm_engine.goodwill",
    }
    trajectory = Table("trajectory", list(tcols), tcols)
    for t in range(traj.T + 1):
        inside = t < traj.T
        trajectory.add(
            t,
            float(traj.NAV[t]),
            float(traj.V[t]),
            traj.v[t],
            traj.nshares[t],
            traj.Sub[t] if t else None,
            traj.m[t] if t else None,
            traj.div_ps[t] if inside else None,
            traj.receipts[t] if inside else None,
            traj.outlays[t] if inside else None,
            pi[t] if inside else None,
            goodwill(traj, t),
        )

    ecols = {
        "t": "index",
        "dividend_stream": "mm_engine.value_dividend_stream",
        "discounted_cashflow": "mm_engine.value_discounted_cashflow",
        "earnings_recursion": "mm_engine.value_earnings_recursion",
        "nav_plus_goodwill": "mm_engine.value_nav_plus_goodwill",
        "backward_recursion": "mm_engine.build_trajectory",
        "max_rel_dev": "mm_engine.check_equivalence",
        "passed": "mm_engine.check_equivalence",
    }
    equivalence = Table("equivalence", list(ecols), ecols)
    failed = False
    for t in range(traj.T + 1):
        rep = check_equivalence(traj, t, tol)
        failed |= not rep.passed
        equivalence.add(t, *(float(rep.values[f]) for f in FORMULAS), rep.max_rel_dev, rep.passed)

    params = dict(sc.params)
    params.setdefault("terminal", {"type": "zero_goodwill"})
    for name in ("Div", "Depr", "COGS", "D"):
        params.setdefault(name, [0.0] * traj.T)
    return RunResult([trajectory, equivalence], params, failed)


def run_mm_fuzz(sc: Scenario, tol: float, seed: int) -> RunResult:
    params = dict(sc.params)
    count = params.pop("count")
    workers = params.pop("workers", 1)
    cfg = FuzzConfig(**params)
    summary = fuzz_equivalence(count, seed, tol, cfg, workers=workers)

    ccols = {
        "index": "fuzz.fuzz_equivalence",
        "attempt": "fuzz.random_trajectory",
        "T": "fuzz.random_trajectory",
        "r": "fuzz.random_trajectory",
        "t_interior": "fuzz.interior_t",
        "dev_t0": "mm_engine.check_equivalence",
        "dev_interior": "mm_engine.check_equivalence",
        "passed": "mm_engine.check_equivalence",
    }
    cases = Table("cases", list(ccols), ccols)
    for c in summary.cases:
        cases.add(c.index, c.attempt, c.T, c.r, c.t_interior, c.dev_t0, c.dev_interior, c.passed)

    scols = {k: "fuzz.fuzz_equivalence" for k in (
        "count", "seed", "tol", "attempts", "rejected", "rejection_rate", "max_rel_dev", "failures"
    )}
    table = Table("summary", list(scols), scols)
    table.add(
        summary.count,
        summary.seed,
        summary.tol,
        summary.attempts,
        summary.rejected,
        summary.rejection_rate,
        summary.max_rel_dev,
        len(summary.failures),
    )
    resolved = {"count": count, "workers": workers, **cfg.to_dict()}
    return RunResult([cases, table], resolved, bool(summary.failures))


def run_ledger(sc: Scenario, tol: float) -> RunResult:
    book = FirmBook.from_dict(sc.params["book"])
    events = [LedgerEvent(e["kind"], e.get("payload", {})) for e in sc.params.get("events", [])]

    ecols = {
        "seq": "ledger.apply_event",
        "kind": "ledger.apply_event",
        "nav": "ledger.apply_event",
        "collective": "ledger.apply_event",
        "balance_total": "ledger.FirmBook.balance_total",
        "total_shares": "ledger.apply_event",
        "share_price": "ledger.apply_event",
        "payout": "ledger.exit_payout",
        "conserved": "ledger.FirmBook.is_conserved",
        "flags": "ledger.FirmBook.flags",
    }
    log = Table("events", list(ecols), ecols)
    failed = not book.is_conserved()
    log.add(0, "Initial", book.nav, book.collective, book.balance_total, book.total_shares,
            book.share_price, None, book.is_conserved(), "; ".join(book.flags()))
    for seq, event in enumerate(events, start=1):
        try:
            book, detail = apply_event(book, event)
        except (LedgerError, KeyError, ValueError) as exc:
            raise ValidationError(f"{type(exc).__name__}: {exc}", f"params.events.{seq - 1}") from exc
        ok = book.is_conserved()
        failed |= not ok
        payout = detail if isinstance(detail, Decimal) else None
        log.add(seq, event.kind, book.nav, book.collective, book.balance_total,
                book.total_shares, book.share_price, payout, ok, "; ".join(book.flags()))

    acols = {
        "member_id": "ledger.FirmBook",
        "denomination": "ledger.FirmBook",
        "balance": "ledger.FirmBook",
        "share_count": "ledger.FirmBook",
        "labor_weight": "ledger.FirmBook",
        "active": "ledger.FirmBook",
    }
    accounts = Table("accounts", list(acols), acols)
    for a in book.accounts:
        accounts.add(a.member_id, a.denomination, a.balance, a.share_count, a.labor_weight, a.active)
    tables = [log, accounts]

    if "market_value" in sc.params:
        mv = money(sc.params["market_value"])
        rep = sellout_incentive(book, mv)
        icols = {
            "member_id": "ledger.sellout_incentive",
            "nav_payout": "ledger.sellout_incentive",
            "market_payout": "ledger.sellout_incentive",
            "delta": "ledger.sellout_incentive",
        }
        incentive = Table("incentive", list(icols), icols)
        for k in rep.deltas:
            incentive.add(k, rep.nav_payouts[k], rep.market_payouts[k], rep.deltas[k])
        incentive.add("ALL", sum(rep.nav_payouts.values(), Decimal("0.00")),
                      sum(rep.market_payouts.values(), Decimal("0.00")), rep.aggregate_delta)
        rcols = {"rule": "ledger.repurchase_liability", "liability": "ledger.repurchase_liability"}
        repurchase = Table("repurchase", list(rcols), rcols)
        repurchase.add("nav", repurchase_liability(book, NAVRule()))
        repurchase.add("market", repurchase_liability(book, MarketRule(mv)))
        tables += [incentive, repurchase]

    extra = {
        "events.jsonl": dump_events(events),
        "final_book.json": book.canonical() + "\n",
    }
    return RunResult(tables, sc.params, failed, extra)


def run_scenario(
    path: str | Path,
    out: str | Path | None = None,
    seed: int | None = None,
    tol: float | None = None,
    fmt: str = "csv",
    quiet: bool = True,
) -> int:
    """Run one scenario file and write its report; returns the exit status.

    Input problems raise ``ParseError`` / ``ValidationError`` /
    ``InfeasibleTrajectory``; :func:`main` turns them into exit status 2.
    """
    sc = load_scenario(path)
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if tol is not None:
        overrides["tol"] = tol
    eff_seed = seed if seed is not None else (sc.seed if sc.seed is not None else 0)
    eff_tol = tol if tol is not None else sc.tol

    if sc.kind == "asset":
        result = run_asset(sc, eff_tol)
    elif sc.kind == "mm_trajectory":
        result = run_mm_trajectory(sc, eff_tol)
    elif sc.kind == "mm_fuzz":
        result = run_mm_fuzz(sc, eff_tol, eff_seed)
    else:
        result = run_ledger(sc, eff_tol)

    tables = result.tables
    if sc.tables is not None:
        known = {t.name for t in tables}
        unknown = [n for n in sc.tables if n not in known]
        if unknown:
            raise ValidationError(f"unknown table(s) {unknown}; available {sorted(known)}", "tables")
        tables = [t for t in tables if t.name in sc.tables]

    status = EXIT_INVARIANT if result.failed else EXIT_OK
    header = {
        "tool": "fairval",
        "version": __version__,
        "scenario": sc.source,
        "scenario_sha256": sc.digest,
        "kind": sc.kind,
        "name": sc.name,
        "seed": eff_seed,
        "tol": eff_tol,
        "format": fmt,
        "overrides": overrides,
        "params": result.params,
        "status": "ok" if status == EXIT_OK else "invariant_failure",
    }
    if out is not None:
        out_dir = Path(out)
        write_report(out_dir, header, tables, fmt)
        for name, text in result.extra_files.items():
            (out_dir / name).write_text(text, encoding="utf-8")
    if not quiet:
        print(f"# {sc.name} ({sc.kind}) seed={eff_seed} tol={eff_tol} status={header['status']}")
        for t in tables:
            print(render_human(t))
    return status


def _error(kind: str, message: str, path: str = "") -> None:
    rec = {"error": kind, "message": message}
    if path:
        rec["path"] = path
    print(json.dumps(rec, sort_keys=True), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fairval", description="Run a valuation or ledger scenario.")
    ap.add_argument("--scenario", required=True, type=Path, help="scenario JSON file")
    ap.add_argument("--out", type=Path, default=None, help="report directory")
    ap.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    ap.add_argument("--tol", type=float, default=None, help="override the relative tolerance")
    ap.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
    ap.add_argument("--quiet", action="store_true", help="do not print tables")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is not None and not 0 <= args.seed < 2**64:
        _error("ValidationError", "seed must be an unsigned 64-bit integer", "--seed")
        return EXIT_INPUT
    try:
        return run_scenario(args.scenario, args.out, args.seed, args.tol, args.fmt, args.quiet)
    except ParseError as exc:
        _error("ParseError", str(exc))
    except ValidationError as exc:
        _error("ValidationError", exc.message, exc.path)
    except (InfeasibleTrajectory, DomainError) as exc:
        _error(type(exc).__name__, str(exc))
    except ValueError as exc:
        _error("ValidationError", str(exc))
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
