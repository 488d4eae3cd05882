import json
import math
from fractions import Fraction

import numpy as np
import pytest

from unavoidable.alloc import binom_residue_distribution
from unavoidable.experiments import (
    CHERRY_CONSTANT,
    ExperimentManifest,
    allocation_experiment,
    band_checks,
    cherry_experiment,
    cherry_kind_sample,
    degree_experiment,
    exact_cherry_mean,
    niceness_experiment,
    path_endpoint_distribution,
    path_endpoint_experiment,
    run_manifest,
)


def closed_form_cherry_mean(n):
    """C(n,3) * 3/n^2 * (1 - 3/n)^(n-4): choose the triple and centre, count completions."""
    return Fraction(math.comb(n, 3) * 3, n * n) * Fraction(n - 3, n) ** (n - 4)


class TestCherries:
    @pytest.mark.parametrize("n", [4, 5, 6, 7])
    def test_exact_matches_closed_form(self, n):
        assert exact_cherry_mean(n) == closed_form_cherry_mean(n)

    def test_small_values(self):
        assert exact_cherry_mean(4) == Fraction(3, 4)
        assert exact_cherry_mean(5) == Fraction(12, 25)

    def test_estimator_against_exact(self):
        res = cherry_experiment(6, 4000, seed=3)
        se = res.summary["sd"] / math.sqrt(4000)
        assert abs(res.summary["mean"] - float(exact_cherry_mean(6))) <= 3 * se

    def test_constant(self):
        assert CHERRY_CONSTANT * 1000 == pytest.approx(24.893, abs=1e-3)

    def test_errors(self):
        with pytest.raises(ValueError):
            cherry_experiment(100, 0)
        with pytest.raises(ValueError):
            cherry_experiment(3, 10)
        with pytest.raises(ValueError):
            exact_cherry_mean(9)

    def test_n1000_band(self):
        res = cherry_experiment(1000, 2000, seed=1)
        assert abs(res.summary["ratio"] - 1) <= 0.05


class TestReproducibility:
    def test_csv_bytes(self):
        a = cherry_experiment(200, 50, seed=9).to_csv()
        b = cherry_experiment(200, 50, seed=9).to_csv()
        assert a == b
        assert a.splitlines()[0].startswith("trial,cherries")
        assert a.splitlines()[-1].startswith("summary,")

    def test_jobs_independent(self):
        assert cherry_experiment(200, 40, seed=2, jobs=2).to_csv() == cherry_experiment(200, 40, seed=2).to_csv()

    def test_seed_matters(self):
        assert cherry_experiment(200, 40, seed=2).rows != cherry_experiment(200, 40, seed=3).rows


class TestNiceness:
    def test_small_run(self):
        res = niceness_experiment(2000, Fraction(1, 250), 40, seed=1)
        assert res.summary["fraction_nice"] >= 0.9
        assert all(r["a_stars"] >= 0 and r["kind_a"] + r["kind_b"] <= r["cherries"] for r in res.rows)

    def test_kind_frequencies(self):
        seen, a, b = cherry_kind_sample(1000, 20_000, seed=4)
        assert seen >= 20_000
        assert abs(a / seen - 3 / 8) <= 0.02 and abs(b / seen - 1 / 4) <= 0.02


class TestDegree:
    def test_prufer_degree_identity(self):
        res = degree_experiment(50, 20, seed=0)
        assert all(2 <= r["max_degree"] <= 49 for r in res.rows)

    @pytest.mark.xfail(strict=True, reason="measured ratio is about 1.81 at n=10^3; the limit is approached only at astronomical n")
    def test_moon_wide_band_n1000(self):
        res = degree_experiment(1000, 1000, seed=1)
        assert 0.6 <= res.summary["ratio"] <= 1.6

    @pytest.mark.slow
    @pytest.mark.xfail(strict=True, reason="measured ratio is about 1.87 at n=10^5; the next-order term decays like logloglog n / loglog n")
    def test_moon_band_n100000(self):
        res = degree_experiment(100_000, 1000, seed=1)
        assert 0.8 <= res.summary["ratio"] <= 1.2


class TestAllocationExperiments:
    def test_band(self):
        res = allocation_experiment(20_000, 10, 10, seed=0)
        assert res.summary["fraction_within"] == 1.0

    def test_endpoint_distribution_is_exact_shift(self):
        # n=5: odd depths 1 and 3 are forced, depths 2 and 4 are coins
        dist = path_endpoint_distribution(5, 3)
        base = [float(p) for p in binom_residue_distribution(2, 3)]
        assert np.allclose(dist, np.roll(base, 2))
        assert dist.sum() == pytest.approx(1.0)

    def test_endpoint_law_against_simulation(self):
        res = path_endpoint_experiment(1000, 5, 4000, seed=0)
        assert res.summary["tv_distance"] < 0.05

    def test_k_guard(self):
        with pytest.raises(ValueError):
            allocation_experiment(100, 0, 5)


class TestManifest:
    def test_round_trip(self):
        m = ExperimentManifest("cherry", {"n": 100, "trials": 5}, seed=3, bands={"ratio": [0.5, 1.5]})
        assert ExperimentManifest.from_json(m.to_json()) == m

    def test_unknown_fields(self):
        with pytest.raises(ValueError):
            ExperimentManifest.from_json(json.dumps({"name": "cherry", "params": {}, "colour": 1}))

    def test_run_writes_outputs(self, tmp_path):
        out = tmp_path / "cherry.csv"
        m = ExperimentManifest("cherry", {"n": 100, "trials": 5}, seed=3, output=str(out), bands={"ratio": [0.0, 10.0]})
        res, checks = run_manifest(m)
        assert checks == {"ratio": True}
        assert out.read_text() == res.to_csv()
        assert ExperimentManifest.from_json((tmp_path / "cherry.csv.manifest.json").read_text()) == m

    def test_unknown_experiment(self):
        with pytest.raises(ValueError):
            run_manifest(ExperimentManifest("nope", {}))

    def test_band_checks(self):
        assert band_checks({"x": 1.0, "y": 3.0}, {"x": [0, 2], "y": [0, 2]}) == {"x": True, "y": False}
