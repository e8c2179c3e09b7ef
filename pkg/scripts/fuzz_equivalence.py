"""Fuzz the five valuations against each other on random feasible firms.

    python scripts/fuzz_equivalence.py --count 1000 --seed 42
"""

import argparse
import time

from fairval.fuzz import fuzz_equivalence


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    start = time.perf_counter()
    s = fuzz_equivalence(args.count, args.seed, args.tol, workers=args.workers)
    elapsed = time.perf_counter() - start

    worst = max(s.cases, key=lambda c: c.max_rel_dev)
    print(f"firms checked    {s.count} (seed {s.seed}, tol {s.tol:g})")
    print(f"draws rejected   {s.rejected} of {s.attempts} ({s.rejection_rate:.1%})")
    print(f"max rel dev      {s.max_rel_dev:.3e} (firm {worst.index}, T={worst.T}, r={worst.r:.4f})")
    print(f"failures         {len(s.failures)}")
    for c in s.failures[:10]:
        print(f"  replay with random_trajectory({s.seed}, {c.index}): dev {c.max_rel_dev:.3e}")
    print(f"elapsed          {elapsed:.2f}s")
    raise SystemExit(1 if s.failures else 0)


if __name__ == "__main__":
    main()
