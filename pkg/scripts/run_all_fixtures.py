#!/usr/bin/env python3
"""Run the full check suite over every shipped fixture and print a summary.

Writes one JSON report per fixture into reports/ (created next to this
script's repository root).  A fixture whose metric leaves the admissible
class is reported as such rather than crashing the sweep.
"""

from collections import Counter
from pathlib import Path

from circgeo.core import AdmissibilityError, load_spec
from circgeo.verify import report_to_json, run_suite

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ["const", "flat-par", "curved-par", "nonpar"]
GRID = 3
SEED = 0


def main() -> None:
    out_dir = ROOT / "reports"
    out_dir.mkdir(exist_ok=True)
    for name in FIXTURES:
        spec = load_spec(ROOT / "fixtures" / f"{name}.json")
        points = spec.domain.grid(GRID)
        try:
            report = run_suite(spec, points, seed=SEED, mu_samples=20, sectional_samples=20)
        except AdmissibilityError as exc:
            print(f"{name:12s} inadmissible: {exc}")
            continue
        path = out_dir / f"{name}.json"
        path.write_text(report_to_json(report))
        counts = Counter(check["status"] for check in report["checks"])
        print(
            f"{name:12s} checks={len(report['checks']):4d} "
            f"pass={counts.get('pass', 0):4d} fail={counts.get('fail', 0):4d} "
            f"skipped={counts.get('skipped', 0):4d} -> {path.relative_to(ROOT)}"
        )


if __name__ == "__main__":
    main()
