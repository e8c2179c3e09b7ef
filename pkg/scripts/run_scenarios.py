"""Run every bundled scenario and write reports under ``reports/<name>/``.

    python scripts/run_scenarios.py [--format json]
"""

import argparse
from pathlib import Path

from fairval.cli import main as fairval

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--out", type=Path, default=ROOT / "reports")
    args = ap.parse_args()

    worst = 0
    for path in sorted((ROOT / "scenarios").glob("*.json")):
        out = args.out / path.stem
        code = fairval(["--scenario", str(path), "--out", str(out), "--format", args.format, "--quiet"])
        print(f"{path.name:<28} exit {code}  -> {out}")
        worst = max(worst, code)
    raise SystemExit(worst)


if __name__ == "__main__":
    main()
