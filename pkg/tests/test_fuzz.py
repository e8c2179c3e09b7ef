import pytest

from fairval.fuzz import FuzzConfig, fuzz_equivalence, interior_t, random_trajectory
from fairval.mm_engine import pure_profit_series


def test_fuzz_small_run_passes():
    s = fuzz_equivalence(50, seed=42)
    assert s.count == 50 and len(s.cases) == 50
    assert not s.failures
    assert s.max_rel_dev <= 1e-9
    assert s.attempts == s.count + s.rejected
    assert [c.index for c in s.cases] == list(range(50))


def test_zero_tolerance_reports_failure():
    s = fuzz_equivalence(1, seed=42, tol=0.0)
    assert len(s.failures) == 1
    assert s.failures[0].max_rel_dev > 0


def test_count_must_be_positive():
    with pytest.raises(ValueError):
        fuzz_equivalence(0, seed=1)


def test_failures_replay_from_seed_and_index():
    s = fuzz_equivalence(5, seed=9, tol=0.0)
    for case in s.failures:
        traj, attempt = random_trajectory(9, case.index)
        assert attempt == case.attempt
        assert traj.T == case.T and traj.r == case.r


def test_trajectories_respect_config():
    cfg = FuzzConfig()
    for i in range(200):
        traj, _ = random_trajectory(3, i, cfg)
        assert cfg.T_min <= traj.T <= cfg.T_max
        assert cfg.r_min <= traj.r <= cfg.r_max
        t = interior_t(3, i, traj.T)
        assert 0 < t < traj.T
        for t, pi in enumerate(pure_profit_series(traj)):
            assert abs(pi) <= cfg.profit_frac * traj.NAV[t] + 1e-9


def test_parallel_matches_serial():
    assert fuzz_equivalence(40, seed=5, workers=2) == fuzz_equivalence(40, seed=5)
