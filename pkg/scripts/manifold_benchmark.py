"""All five classifiers on the curved-manifold fixture, mean(std) table.

Each trial draws fresh training curves and one observation arc per class;
the table reports the error rate of every method over the trials.

Usage:
    python scripts/manifold_benchmark.py [--trials 20] [--m 16] [--seed 0]
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from masc.evaluate import CLASSIFIERS, make_classifier
from masc.fixtures import CurvedManifoldConfig, CurvedManifoldFixture


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--m", type=int, default=16)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    fixture = CurvedManifoldFixture(CurvedManifoldConfig(seed=args.seed))
    classifiers = {name: make_classifier(name, k=5, q=9) for name in CLASSIFIERS}
    errors = {name: [] for name in CLASSIFIERS}
    for t in range(args.trials):
        wrong = {name: 0 for name in CLASSIFIERS}
        for cls in range(1, fixture.classes + 1):
            rng = np.random.default_rng(np.random.SeedSequence([args.seed, args.m, t, cls]))
            train, obs = fixture.make_instance(cls, args.m, rng)
            for name, clf in classifiers.items():
                wrong[name] += int(clf(train, obs).decision != cls)
        for name in CLASSIFIERS:
            errors[name].append(wrong[name] / fixture.classes)

    print(f"{args.trials} trials, m={args.m}, seed={args.seed}")
    print(f"{'method':8s} {'rate %':>10s}")
    for name in CLASSIFIERS:
        errs = np.asarray(errors[name])
        rate = 100.0 * (1.0 - errs.mean())
        print(f"{name:8s} {rate:7.2f} ({100.0 * errs.std():.2f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
