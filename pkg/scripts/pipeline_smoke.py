"""Smoke-run both embedding pipelines on planted instances and write a JSON manifest.

Usage: python3 scripts/pipeline_smoke.py [--instances 100] [--out smoke.json]
"""

import argparse
import json
import sys
import time
from collections import Counter

from unavoidable.embed import ClusterDecomposition, PairParams, StageFailure, cct_pipeline, directed_pair_pipeline
from unavoidable.planted import planted_cyclic_host, planted_nice_tree, planted_pair_host

# calibration floors, as a fraction of instances
PAIR_FLOOR = 0.90
CCT_FLOOR = 0.80


def run_pair(seed):
    g, U, W = planted_pair_host(300, 0.005, seed)
    t = planted_nice_tree(300, 20, 22, seed=seed)
    emb = directed_pair_pipeline(t, g, (U, W), PairParams(mu=0.005, retries=32), seed=seed)
    return emb.is_valid(t, g, spanning=True)


def run_cct(seed):
    g, clusters, _ = planted_cyclic_host(6, 40, 0.9, seed)
    t = planted_nice_tree(240, 10, 30, seed=seed)
    emb = cct_pipeline(t, g, ClusterDecomposition.of(240, clusters), seed=seed)
    return emb.is_valid(t, g, spanning=True)


def sweep(fn, instances):
    ok, stages = 0, Counter()
    start = time.perf_counter()
    for seed in range(instances):
        try:
            ok += fn(seed)
        except StageFailure as exc:
            stages[exc.stage] += 1
    return {"successes": ok, "instances": instances, "failures_by_stage": dict(stages), "seconds": round(time.perf_counter() - start, 2)}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--instances", type=int, default=100)
    parser.add_argument("--out", default="pipeline_smoke.json")
    args = parser.parse_args()
    report = {
        "pair": {"n": 300, "mu": 0.005, "retries": 32, "tree": "planted 20 A + 22 B cherries", "floor": PAIR_FLOOR, **sweep(run_pair, args.instances)},
        "cct": {"n": 240, "k": 6, "p": 0.9, "tree": "planted 10 A + 30 B cherries", "floor": CCT_FLOOR, **sweep(run_cct, args.instances)},
    }
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    print(json.dumps(report, indent=2, sort_keys=True))
    passed = all(r["successes"] >= r["floor"] * r["instances"] for r in report.values())
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
