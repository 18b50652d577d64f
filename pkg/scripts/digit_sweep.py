"""Observation-count sweep on the rotated-raster fixture, MASC vs LP.

Desk-scale version of the multiple-observation digit experiment: 10 raster
classes, 2 labelled + 4 virtual samples per class, observation sets of
increasing size drawn as random rotations in [-40, 40] degrees.

Usage:
    python scripts/digit_sweep.py [--trials 20] [--seed 0] [--out sweep.csv]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from masc.evaluate import make_classifier, observation_sweep, sweep_to_csv
from masc.fixtures import RotatedRasterConfig, RotatedRasterFixture


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m-values", default="10,30,50,70,90,110,130,150")
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    m_values = [int(v) for v in args.m_values.split(",")]
    fixture = RotatedRasterFixture(RotatedRasterConfig(seed=args.seed))
    all_reports = []
    for name in ("masc", "lp"):
        reports = observation_sweep(
            fixture.make_instance,
            make_classifier(name, k=5),
            fixture.classes,
            m_values,
            trials=args.trials,
            seed=args.seed,
            classifier_name=name,
        )
        all_reports.extend(reports)
        print(f"{name}:")
        for r in reports:
            print(f"  m={r.m:4d}  error {r.mean_error:.4f} ({r.std_error:.4f})")
    if args.out:
        Path(args.out).write_text(sweep_to_csv(all_reports), encoding="utf-8")
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
