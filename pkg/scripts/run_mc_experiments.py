"""Run the Monte Carlo experiments and write one CSV plus manifest per experiment.

Usage: python3 scripts/run_mc_experiments.py [--out results/] [--quick] [--jobs N]
"""

import argparse
import json
import sys
from pathlib import Path

from unavoidable.experiments import ExperimentManifest, run_manifest

FULL = [
    ExperimentManifest("cherry", {"n": 1000, "trials": 10_000}, seed=8, bands={"ratio": [0.95, 1.05]}),
    ExperimentManifest("niceness", {"n": 2000, "alpha": 0.004, "trials": 1000}, seed=10, bands={"fraction_nice": [0.99, 1.0]}),
    ExperimentManifest("allocation", {"n": 100_000, "k": 10, "trials": 100}, seed=12, bands={"fraction_within": [0.95, 1.0]}),
    ExperimentManifest("path_endpoint", {"n": 1000, "k": 5, "trials": 4000}, seed=0, bands={"tv_distance": [0.0, 0.05]}),
    # no band: the degree ratio converges far too slowly to test at desk scale, so only the value is recorded
    ExperimentManifest("degree", {"n": 1000, "trials": 1000}, seed=1),
]


def shrink(m: ExperimentManifest) -> ExperimentManifest:
    params = dict(m.params, trials=max(1, m.params["trials"] // 20))
    return ExperimentManifest(m.name, params, m.seed, bands=m.bands)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--quick", action="store_true", help="one twentieth of the trials")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    all_ok = True
    for m in FULL:
        m = shrink(m) if args.quick else m
        m.output = str(out / f"{m.name}.csv")
        result, checks = run_manifest(m, jobs=args.jobs)
        all_ok &= all(checks.values())
        print(json.dumps({"experiment": m.name, "summary": result.summary, "bands": checks}))
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
