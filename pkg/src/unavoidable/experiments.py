"""Monte Carlo experiments on random labelled trees, with reproducible CSV output.

Each experiment runs ``trials`` independent trials.  Trial ``i`` draws from
``default_rng([seed, i])``, so results do not depend on how trials are
scheduled across workers.  Results are one row per trial plus a summary.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .alloc import allocate, allocation_histogram, binom_residue_distribution, loglog_slack, residue_as_floats
from .otree import OrientedTree, directed_path, prufer_decode, random_oriented_tree
from .stars import cherry_count_from_edges, cherry_kinds, pendant_star_census, star_quota

CHERRY_CONSTANT = math.exp(-3) / 2


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def _chunk(fn: Callable, seed: int, trials: range, kwargs: dict) -> list[dict]:
    return [fn(trial_rng(seed, i), **kwargs) for i in trials]


def run_trials(fn: Callable, trials: int, seed: int, jobs: int = 1, **kwargs) -> list[dict]:
    """Rows of ``fn(rng, **kwargs)`` for every trial, in trial order."""
    if jobs <= 1 or trials < 2 * jobs:
        rows = _chunk(fn, seed, range(trials), kwargs)
    else:
        size = -(-trials // jobs)
        parts = [range(i, min(i + size, trials)) for i in range(0, trials, size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(itertools.chain.from_iterable(pool.map(_chunk, [fn] * len(parts), [seed] * len(parts), parts, [kwargs] * len(parts))))
    return [{"trial": i, **row} for i, row in enumerate(rows)]


def _mean_sd(values) -> tuple[float, float]:
    values = list(values)
    mean = math.fsum(values) / len(values)
    if len(values) < 2:
        return mean, 0.0
    return mean, math.sqrt(math.fsum((x - mean) ** 2 for x in values) / (len(values) - 1))


@dataclass
class ExperimentResult:
    name: str
    rows: list[dict]
    summary: dict

    def to_csv(self) -> str:
        columns = list(self.rows[0]) if self.rows else ["trial"]
        extra = [c for c in self.summary if c not in columns]
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=columns + extra, lineterminator="\n", restval="")
        w.writeheader()
        w.writerows(self.rows)
        w.writerow({"trial": "summary", **{k: _fmt(v) for k, v in self.summary.items()}})
        return buf.getvalue()


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def _check_trials(trials: int, minimum: int = 1) -> None:
    if trials < minimum:
        raise ValueError(f"trials must be at least {minimum}, got {trials}")


# --- pendant cherries ---------------------------------------------------------


def _cherry_trial(rng, n: int) -> dict:
    seq = rng.integers(0, n, size=n - 2).tolist()
    edges = np.array(prufer_decode(seq, n), dtype=np.int64)
    return {"cherries": cherry_count_from_edges(edges, n)}


def cherry_experiment(n: int, trials: int, seed: int = 0, jobs: int = 1) -> ExperimentResult:
    """Pendant-cherry counts of uniform labelled trees against ``e^-3/2 * n``."""
    if n < 4:
        raise ValueError("n must be at least 4")
    _check_trials(trials)
    rows = run_trials(_cherry_trial, trials, seed, jobs, n=n)
    mean, sd = _mean_sd(r["cherries"] for r in rows)
    half = 1.96 * sd / math.sqrt(trials)
    target = CHERRY_CONSTANT * n
    summary = {"mean": mean, "sd": sd, "ci_low": mean - half, "ci_high": mean + half, "target": target, "ratio": mean / target}
    return ExperimentResult("cherry", rows, summary)


def exact_cherry_mean(n: int) -> Fraction:
    """Expected pendant-cherry count by enumerating all ``n^(n-2)`` labelled trees."""
    if not 4 <= n <= 8:
        raise ValueError("exact enumeration is limited to 4 <= n <= 8")
    total = 0
    count = 0
    for seq in itertools.product(range(n), repeat=n - 2):
        edges = np.array(prufer_decode(list(seq), n), dtype=np.int64)
        total += cherry_count_from_edges(edges, n)
        count += 1
    return Fraction(total, count)


# --- niceness -----------------------------------------------------------------


def _niceness_trial(rng, n: int, alpha) -> dict:
    t = random_oriented_tree(n, rng)
    cert = pendant_star_census(t)
    kinds = cherry_kinds(t)
    quota = star_quota(alpha, n)
    return {
        "nice": int(min(len(cert.a_stars), len(cert.b_stars)) >= quota),
        "a_stars": len(cert.a_stars),
        "b_stars": len(cert.b_stars),
        "cherries": len(kinds),
        "kind_a": kinds.count("A"),
        "kind_b": kinds.count("B"),
    }


def niceness_experiment(n: int, alpha, trials: int, seed: int = 0, jobs: int = 1) -> ExperimentResult:
    """Fraction of uniform oriented trees that are alpha-nice, and the cherry kind frequencies."""
    _check_trials(trials)
    rows = run_trials(_niceness_trial, trials, seed, jobs, n=n, alpha=alpha)
    cherries = sum(r["cherries"] for r in rows)
    summary = {
        "fraction_nice": sum(r["nice"] for r in rows) / trials,
        "cherries": cherries,
        "freq_a": sum(r["kind_a"] for r in rows) / cherries if cherries else float("nan"),
        "freq_b": sum(r["kind_b"] for r in rows) / cherries if cherries else float("nan"),
    }
    return ExperimentResult("niceness", rows, summary)


def cherry_kind_sample(n: int, cherries: int, seed: int = 0) -> tuple[int, int, int]:
    """Sample trees until ``cherries`` pendant cherries are seen; returns (cherries, kind A, kind B)."""
    seen = a = b = 0
    trial = 0
    while seen < cherries:
        kinds = cherry_kinds(random_oriented_tree(n, trial_rng(seed, trial)))
        trial += 1
        seen += len(kinds)
        a += kinds.count("A")
        b += kinds.count("B")
    return seen, a, b


# --- maximum degree -------------------------------------------------------------


def _degree_trial(rng, n: int) -> dict:
    seq = rng.integers(0, n, size=n - 2)
    return {"max_degree": int(np.bincount(seq, minlength=n).max()) + 1}


def degree_experiment(n: int, trials: int, seed: int = 0, jobs: int = 1) -> ExperimentResult:
    """Maximum degree of uniform labelled trees against ``log n / log log n``.

    A vertex's degree is one more than its multiplicity in the Prüfer sequence.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    _check_trials(trials)
    rows = run_trials(_degree_trial, trials, seed, jobs, n=n)
    mean, sd = _mean_sd(r["max_degree"] for r in rows)
    scale = math.log(n) / math.log(math.log(n))
    summary = {"mean": mean, "sd": sd, "min": min(r["max_degree"] for r in rows), "scale": scale, "ratio": mean / scale}
    return ExperimentResult("degree", rows, summary)


# --- allocation -------------------------------------------------------------------


def _allocation_trial(rng, n: int, k: int) -> dict:
    t = random_oriented_tree(n, rng)
    counts = allocation_histogram(allocate(t, 0, k, rng))
    dev = max(abs(c / n - 1 / k) for c in counts)
    return {"max_deviation": dev, "within": int(dev <= loglog_slack(n))}


def allocation_experiment(n: int, k: int, trials: int, seed: int = 0, jobs: int = 1) -> ExperimentResult:
    """Per-cluster load of random allocations of random oriented trees."""
    if k < 1:
        raise ValueError("k must be positive")
    _check_trials(trials)
    rows = run_trials(_allocation_trial, trials, seed, jobs, n=n, k=k)
    summary = {
        "fraction_within": sum(r["within"] for r in rows) / trials,
        "worst_deviation": max(r["max_deviation"] for r in rows),
        "slack": loglog_slack(n),
    }
    return ExperimentResult("allocation", rows, summary)


def path_endpoint_distribution(n: int, k: int) -> np.ndarray:
    """Exact law of the far endpoint's cluster when a directed path is allocated from one end.

    Odd-depth vertices always step one cluster on; each of the remaining
    non-root vertices steps with probability 1/2.  Index ``i`` is cluster
    ``i + 1``.
    """
    forced = n // 2  # depths 1, 3, ... up to n - 1
    free = (n - 1) - forced
    dist = residue_as_floats(binom_residue_distribution(free, k))
    return np.roll(dist, forced % k)


def _endpoint_trial(rng, path: OrientedTree, k: int) -> dict:
    alloc = allocate(path, 0, k, rng)
    return {"endpoint_cluster": alloc.cluster_of[path.n - 1]}


def path_endpoint_experiment(n: int, k: int, trials: int, seed: int = 0, jobs: int = 1) -> ExperimentResult:
    """Empirical endpoint-cluster law of a directed path, with its total-variation distance to the exact law."""
    _check_trials(trials)
    path = directed_path(n)
    rows = run_trials(_endpoint_trial, trials, seed, jobs, path=path, k=k)
    freq = np.bincount([r["endpoint_cluster"] - 1 for r in rows], minlength=k) / trials
    exact = path_endpoint_distribution(n, k)
    summary = {"tv_distance": float(0.5 * np.abs(freq - exact).sum())}
    return ExperimentResult("path_endpoint", rows, summary)


# --- manifests --------------------------------------------------------------------

EXPERIMENTS: dict[str, Callable[..., ExperimentResult]] = {
    "cherry": cherry_experiment,
    "niceness": niceness_experiment,
    "degree": degree_experiment,
    "allocation": allocation_experiment,
    "path_endpoint": path_endpoint_experiment,
}


@dataclass
class ExperimentManifest:
    """Everything needed to rerun an experiment.

    ``bands`` maps summary keys to accepted ``[low, high]`` intervals; they
    are data, so tightening one does not touch code.
    """

    name: str
    params: dict
    seed: int = 0
    version: str = __version__
    output: str | None = None
    bands: dict[str, list[float]] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentManifest":
        data = json.loads(text)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown manifest fields: {sorted(unknown)}")
        return cls(**data)


def band_checks(summary: dict, bands: dict) -> dict[str, bool]:
    return {key: lo <= summary[key] <= hi for key, (lo, hi) in bands.items()}


def run_manifest(manifest: ExperimentManifest, jobs: int = 1) -> tuple[ExperimentResult, dict[str, bool]]:
    """Run a manifest; writes ``<output>`` (CSV) and ``<output>.manifest.json`` when an output path is set."""
    if manifest.name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {manifest.name!r}; choose from {sorted(EXPERIMENTS)}")
    result = EXPERIMENTS[manifest.name](**manifest.params, seed=manifest.seed, jobs=jobs)
    checks = band_checks(result.summary, manifest.bands)
    if manifest.output:
        out = Path(manifest.output)
        out.write_text(result.to_csv())
        Path(str(out) + ".manifest.json").write_text(manifest.to_json() + "\n")
    return result, checks
