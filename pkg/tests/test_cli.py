import csv
import io
import json
import subprocess
import sys

import pytest

from unavoidable import FORMAT_VERSION, __version__
from unavoidable.cli import main, sha256_file
from unavoidable.otree import OrientedTree
from unavoidable.tournament import Tournament


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def replay(record_path):
    rec = json.loads(record_path.read_text())
    assert main(rec["argv"]) == 0
    return rec


class TestExitCodes:
    def test_unavoidable_named_path(self, capsys):
        code, out, _ = run(capsys, "unavoidable", "--tree", "path-directed-5")
        assert code == 0 and json.loads(out)["verdict"] == "unavoidable"

    def test_avoidable_is_success(self, capsys):
        code, out, _ = run(capsys, "unavoidable", "--tree", "path-antidirected-5")
        data = json.loads(out)
        assert code == 0 and data["verdict"] == "avoidable" and data["witness"]["n"] == 5

    def test_unknown_flag(self, capsys):
        code, _, err = run(capsys, "census", "--n", "3", "--colour", "red")
        assert code == 2 and "--colour" in err

    def test_unknown_subcommand(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2

    def test_bad_fixture_name(self, capsys):
        code, _, err = run(capsys, "analyze-tree", "--tree", "spiral-4")
        assert code == 2 and "--tree" in err

    def test_malformed_file_names_field(self, capsys, tmp_path):
        bad = tmp_path / "t.json"
        bad.write_text(json.dumps({"n": 3, "edges": [[0, 1]]}))
        code, _, err = run(capsys, "analyze-tree", "--tree", str(bad))
        assert code == 2 and "--tree" in err
        bad.write_text("{not json")
        assert run(capsys, "analyze-tree", "--tree", str(bad))[0] == 2

    def test_unknown_params_field(self, capsys, tmp_path):
        p = tmp_path / "p.json"
        p.write_text(json.dumps({"eta": 0.1, "zeta": 2}))
        code, _, err = run(capsys, "structure", "--host", "transitive-10", "--params", str(p))
        assert code == 2 and "zeta" in err

    def test_no_copy_is_domain_failure(self, capsys):
        code, out, _ = run(capsys, "embed", "--tree", "path-antidirected-7", "--host", "paley-7")
        assert code == 1 and json.loads(out)["stage"] == "backtrack"

    def test_pipeline_precondition_failure(self, capsys):
        code, out, _ = run(capsys, "embed", "--engine", "pipeline-pair", "--tree", "path-directed-20", "--host", "transitive-20")
        assert code == 1 and json.loads(out)["stage"] == "precondition"

    def test_census_range(self, capsys):
        assert run(capsys, "census", "--n", "9")[0] == 2

    def test_version(self, capsys):
        code, out, _ = run(capsys, "--version")
        assert code == 0 and __version__ in out and f"format {FORMAT_VERSION}" in out


class TestSubcommands:
    def test_gen_tree_formats(self, capsys):
        _, out, _ = run(capsys, "gen-tree", "--n", "12", "--seed", "3")
        assert OrientedTree.from_json(json.loads(out)).n == 12
        _, out, _ = run(capsys, "gen-tree", "--n", "12", "--seed", "3", "--prufer")
        assert OrientedTree.from_json(json.loads(out)).n == 12

    def test_gen_tournament_named(self, capsys):
        _, out, _ = run(capsys, "gen-tournament", "--name", "paley-7")
        g = Tournament.from_json(json.loads(out))
        assert g.n == 7 and all(g.out_degree(v) == 3 for v in range(7))

    def test_analyze_tree_csv(self, capsys):
        _, out, _ = run(capsys, "analyze-tree", "--tree", "out-star-4", "--format", "csv")
        rows = dict(csv.reader(io.StringIO(out)))
        assert rows["out_leaves"] == "3" and rows["pendant_cherries"] == "3"

    def test_allocate(self, capsys):
        _, out, _ = run(capsys, "allocate", "--tree", "path-directed-6", "--k", "3", "--seed", "1")
        data = json.loads(out)
        assert data["k"] == 3 and data["cluster_of"]["0"] == 1 and data["cluster_of"]["1"] == 2

    def test_embed_backtrack(self, capsys):
        code, out, _ = run(capsys, "embed", "--tree", "path-antidirected-5", "--host", "paley-7")
        assert code == 0 and len(json.loads(out)["map"]) == 5

    def test_g_value(self, capsys):
        _, out, _ = run(capsys, "g-value", "--tree", "out-star-3", "--n-max", "5")
        assert json.loads(out)["value"] == 4

    def test_census(self, capsys):
        _, out, _ = run(capsys, "census", "--n", "4")
        assert len(out.strip().splitlines()) == 1 + 8

    def test_structure(self, capsys):
        _, out, _ = run(capsys, "structure", "--host", "circulant-11")
        assert json.loads(out)["kind"] == "dense"

    def test_experiment(self, capsys):
        code, out, _ = run(capsys, "experiment", "--name", "cherry", "--n", "50", "--trials", "5", "--seed", "2")
        assert code == 0 and out.splitlines()[-1].startswith("summary,")

    def test_experiment_needs_name(self, capsys):
        assert run(capsys, "experiment")[0] == 2


class TestPipelinesFromFiles:
    def test_pair_pipeline(self, capsys, tmp_path):
        host, decomp, tree = tmp_path / "g.json", tmp_path / "d.json", tmp_path / "t.json"
        run(capsys, "gen-tournament", "--kind", "planted-pair", "--n", "300", "--seed", "0", "--out", str(host), "--decomp-out", str(decomp))
        run(capsys, "gen-tree", "--kind", "planted-nice", "--n", "300", "--a-cherries", "20", "--b-cherries", "22", "--seed", "0", "--out", str(tree))
        params = tmp_path / "p.json"
        params.write_text(json.dumps({"mu": 0.005, "retries": 32}))
        code, out, _ = run(capsys, "embed", "--engine", "pipeline-pair", "--tree", str(tree), "--host", str(host), "--decomp", str(decomp), "--params", str(params), "--seed", "0", "--format", "csv")
        assert code == 0 and len(out.strip().splitlines()) == 301

    def test_cct_needs_clusters(self, capsys):
        assert run(capsys, "embed", "--engine", "pipeline-cct", "--tree", "out-star-5", "--host", "paley-7")[0] == 2


class TestRunRecords:
    @pytest.mark.parametrize(
        "argv",
        [
            ["census", "--n", "4"],
            ["gen-tree", "--n", "30", "--seed", "5"],
            ["gen-tournament", "--n", "20", "--seed", "5"],
            ["allocate", "--tree", "path-directed-30", "--k", "4", "--seed", "9", "--format", "csv"],
            ["experiment", "--name", "allocation", "--n", "200", "--trials", "3", "--k", "3", "--seed", "1"],
        ],
    )
    def test_replay_is_byte_identical(self, capsys, tmp_path, argv):
        out = tmp_path / "out.txt"
        assert main([*argv, "--out", str(out)]) == 0
        first = out.read_bytes()
        record_path = tmp_path / "out.txt.run.json"
        rec = json.loads(record_path.read_text())
        assert rec["subcommand"] == argv[0] and rec["output"] == {str(out): sha256_file(out)}
        assert rec["started"] <= rec["finished"]
        out.unlink()
        replay(record_path)
        assert out.read_bytes() == first

    def test_inputs_hashed_and_untouched(self, capsys, tmp_path):
        tree = tmp_path / "t.json"
        main(["gen-tree", "--n", "40", "--seed", "1", "--out", str(tree)])
        before = tree.read_bytes()
        out = tmp_path / "a.csv"
        assert main(["analyze-tree", "--tree", str(tree), "--out", str(out)]) == 0
        rec = json.loads((tmp_path / "a.csv.run.json").read_text())
        assert rec["inputs"] == {str(tree): sha256_file(tree)}
        assert tree.read_bytes() == before


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "unavoidable", "census", "--n", "3"], capture_output=True, text=True, check=False)
    assert res.returncode == 0 and len(res.stdout.strip().splitlines()) == 4
