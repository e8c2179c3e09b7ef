"""Random feasible firm trajectories and the five-formula equivalence fuzzer.

Every trajectory is drawn from its own generator seeded with
``(seed, index, attempt)``, so any single case can be replayed without
regenerating the ones before it, and results do not depend on whether the
cases run serially or in parallel.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .mm_engine import (
    ExplicitValue,
    FirmPrimitives,
    FirmTrajectory,
    InfeasibleTrajectory,
    ZeroGoodwill,
    build_trajectory,
    check_equivalence,
)


@dataclass(frozen=True)
class FuzzConfig:
    T_min: int = 2
    T_max: int = 40
    r_min: float = 0.01
    r_max: float = 0.30
    # |pure profit| as a fraction of the period's opening NAV
    profit_frac: float = 0.5
    nav0_min: float = 100.0
    nav0_max: float = 10_000.0
    invest_min_frac: float = -0.1
    invest_max_frac: float = 0.2
    explicit_terminal_prob: float = 0.25
    max_attempts: int = 100

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def rng_for(seed: int, index: int, attempt: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, index, attempt])


def random_primitives(rng: np.random.Generator, cfg: FuzzConfig = FuzzConfig()):
    """Draw ``(FirmPrimitives, TerminalCondition)``. Feasibility is not checked here."""
    T = int(rng.integers(cfg.T_min, cfg.T_max + 1))
    r = float(rng.uniform(cfg.r_min, cfg.r_max))
    nav = float(rng.uniform(cfg.nav0_min, cfg.nav0_max))
    nav0 = nav
    n0 = float(rng.integers(10, 1001))
    A, I, Div, Depr, COGS, D = [], [], [], [], [], []
    for _ in range(T):
        profit = nav * float(rng.uniform(-cfg.profit_frac, cfg.profit_frac))
        a = r * nav + profit
        inv = nav * float(rng.uniform(cfg.invest_min_frac, cfg.invest_max_frac))
        A.append(a)
        I.append(inv)
        Div.append(max(a, 0.0) * float(rng.uniform(0.0, 1.5)))
        Depr.append(nav * float(rng.uniform(0.0, 0.2)))
        COGS.append(nav * float(rng.uniform(0.0, 2.0)))
        D.append(nav * float(rng.uniform(0.0, 1.0)))
        nav += inv
    if rng.uniform() < cfg.explicit_terminal_prob:
        terminal = ExplicitValue(nav * float(rng.uniform(0.5, 1.5)))
    else:
        terminal = ZeroGoodwill()
    p = FirmPrimitives(
        r=r, NAV0=nav0, n0=n0, A=A, I=I, Div=Div, Depr=Depr, COGS=COGS, D=D
    )
    return p, terminal


def random_dividends(rng: np.random.Generator, p: FirmPrimitives) -> tuple:
    """An alternative nonnegative dividend policy for the same firm."""
    return tuple(
        max(a, 0.0) * float(rng.uniform(0.0, 2.0)) + abs(a) * float(rng.uniform(0.0, 0.1))
        for a in p.A
    )


def random_trajectory(seed: int, index: int, cfg: FuzzConfig = FuzzConfig()):
    """First feasible trajectory for ``(seed, index)``; returns ``(traj, attempt)``.

    Drawn primitives that give a nonpositive share price or count are
    rejected and redrawn with the next attempt number.
    """
    for attempt in range(cfg.max_attempts):
        rng = rng_for(seed, index, attempt)
        p, terminal = random_primitives(rng, cfg)
        try:
            return build_trajectory(p, terminal), attempt
        except InfeasibleTrajectory:
            continue
    raise InfeasibleTrajectory(
        f"no feasible trajectory for seed={seed} index={index} in {cfg.max_attempts} attempts"
    )


def interior_t(seed: int, index: int, T: int) -> int:
    rng = np.random.default_rng([seed, index, 2**32 - 1])
    return int(rng.integers(1, T)) if T >= 2 else T


@dataclass(frozen=True)
class FuzzCase:
    """One trajectory, checked at ``t = 0`` and at ``t_interior``."""

    index: int
    attempt: int
    T: int
    r: float
    t_interior: int
    dev_t0: float
    dev_interior: float
    passed: bool

    @property
    def max_rel_dev(self) -> float:
        return max(self.dev_t0, self.dev_interior)


@dataclass(frozen=True)
class FuzzSummary:
    count: int
    seed: int
    tol: float
    attempts: int
    rejected: int
    max_rel_dev: float
    cases: tuple = ()
    failures: tuple = field(default=())

    @property
    def rejection_rate(self) -> float:
        return self.rejected / self.attempts if self.attempts else 0.0


def _run_one(args) -> FuzzCase:
    seed, index, tol, cfg = args
    traj, attempt = random_trajectory(seed, index, cfg)
    t = interior_t(seed, index, traj.T)
    at0 = check_equivalence(traj, 0, tol)
    inner = check_equivalence(traj, t, tol)
    return FuzzCase(
        index=index,
        attempt=attempt,
        T=traj.T,
        r=traj.r,
        t_interior=t,
        dev_t0=at0.max_rel_dev,
        dev_interior=inner.max_rel_dev,
        passed=at0.passed and inner.passed,
    )


def fuzz_equivalence(
    count: int,
    seed: int,
    tol: float = 1e-9,
    cfg: FuzzConfig = FuzzConfig(),
    workers: int = 1,
) -> FuzzSummary:
    """Check the five valuations agree on ``count`` random feasible firms.

    Each firm is checked at ``t = 0`` and at one random interior period.
    Failures are returned as data; replay a failure with
    ``random_trajectory(seed, case.index)``.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count!r}")
    jobs = [(seed, i, tol, cfg) for i in range(count)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=max(1, count // (4 * workers))))
    else:
        results = [_run_one(j) for j in jobs]
    cases = tuple(results)
    rejected = sum(c.attempt for c in cases)
    return FuzzSummary(
        count=count,
        seed=seed,
        tol=tol,
        attempts=count + rejected,
        rejected=rejected,
        max_rel_dev=max(c.max_rel_dev for c in cases),
        cases=cases,
        failures=tuple(c for c in cases if not c.passed),
    )


def with_dividends(traj: FirmTrajectory, div) -> FirmTrajectory:
    return build_trajectory(replace(traj.primitives, Div=tuple(div)), traj.terminal)
