import csv
import json
import shutil
from pathlib import Path

import pytest

from sewtree.cli import main

from conftest import FIXTURES


@pytest.fixture()
def workspace(tmp_path):
    """Corpus layout: fixture doc + grammars + specs, with a linearized ref."""
    corpus = tmp_path / "corpus"
    out = tmp_path / "out"
    corpus.mkdir()
    shutil.copy(FIXTURES / "docs" / "skirt-demo.json", corpus / "skirt-demo.json")
    refs = tmp_path / "refs"
    refs.mkdir()
    ref = {
        "pattern_id": "skirt",
        "doc_id": "skirt-ref",
        "steps": [
            "Sew the Over Skirt (A) to the Under Skirt (B).",
            "Sew the component containing the Over Skirt (A) to itself.",
            "Sew the component containing the Over Skirt (A) to the Waistband (C).",
        ],
    }
    (refs / "skirt.json").write_text(json.dumps(ref))
    return {
        "corpus": corpus,
        "grammars": FIXTURES / "grammars",
        "specs": FIXTURES / "specs",
        "refs": refs,
        "out": out,
    }


def run(*argv):
    return main([str(a) for a in argv])


class TestGenGold:
    def test_skirt(self, tmp_path, capsys):
        assert run("gen-gold", FIXTURES / "grammars" / "skirt.grammar") == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["trees"] == ["(ABC_1 (AB_1 (AB A B)) C)"]

    def test_cap_exceeded_exit_code(self, capsys):
        code = run("gen-gold", FIXTURES / "grammars" / "pants_combined.grammar", "--cap", "3")
        assert code == 1

    def test_missing_file_is_config_error(self):
        assert run("gen-gold", "/nonexistent/x.grammar") == 2


class TestValidateGrammar:
    def test_fixtures_ok(self, capsys):
        paths = sorted((FIXTURES / "grammars").glob("*.grammar"))
        assert run("validate-grammar", *paths) == 0
        assert "INVALID" not in capsys.readouterr().out

    def test_invalid_grammar(self, tmp_path, capsys):
        bad = tmp_path / "bad.grammar"
        bad.write_text("pattern: x\npieces: A B C\nroots: AB\nAB -> A B\n")
        assert run("validate-grammar", bad) == 1
        assert "INVALID" in capsys.readouterr().out


class TestExtractAndBuild:
    def test_extract(self, tmp_path, capsys):
        assert (
            run(
                "extract",
                "--doc", FIXTURES / "docs" / "skirt-demo.json",
                "--spec", FIXTURES / "specs" / "skirt.json",
            )
            == 0
        )
        payload = json.loads(capsys.readouterr().out)
        assert payload["pieces_per_step"] == [["A", "B"], ["A", "B"], ["C", "A", "B"], [], []]

    def test_build(self, capsys):
        assert (
            run(
                "build",
                "--doc", FIXTURES / "docs" / "skirt-demo.json",
                "--spec", FIXTURES / "specs" / "skirt.json",
            )
            == 0
        )
        payload = json.loads(capsys.readouterr().out)
        assert payload["forest"]["trees"] == ["(ABC_1 (AB_1 (AB A B)) C)"]


class TestScore:
    def test_score_writes_csv_and_reports(self, workspace, capsys):
        code = run(
            "score",
            "--corpus", workspace["corpus"],
            "--grammars", workspace["grammars"],
            "--specs", workspace["specs"],
            "--refs", workspace["refs"],
            "--out", workspace["out"],
        )
        assert code == 0
        with open(workspace["out"] / "scores.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 1
        row = rows[0]
        assert row["doc_id"] == "skirt-demo"
        assert row["tree_f1"] == "1.000000"
        assert row["bleu"] != "" and row["rouge_l"] != ""
        assert (workspace["out"] / "reports" / "skirt-demo.json").exists()

    def test_unknown_pattern_named_in_error(self, workspace, capsys):
        doc = {"pattern_id": "hat", "doc_id": "hat-1", "steps": ["Sew (A) to (B)."]}
        (workspace["corpus"] / "hat-1.json").write_text(json.dumps(doc))
        code = run(
            "score",
            "--corpus", workspace["corpus"],
            "--grammars", workspace["grammars"],
            "--specs", workspace["specs"],
            "--out", workspace["out"],
        )
        assert code == 2
        assert "hat-1" in capsys.readouterr().err

    def test_union_equals_concatenation(self, workspace, tmp_path, capsys):
        # scoring two docs together equals scoring them separately
        doc2 = json.loads((FIXTURES / "docs" / "skirt-demo.json").read_text())
        doc2["doc_id"] = "skirt-demo-copy"
        (workspace["corpus"] / "copy.json").write_text(json.dumps(doc2))
        out_union = tmp_path / "union"
        run(
            "score",
            "--corpus", workspace["corpus"],
            "--grammars", workspace["grammars"],
            "--specs", workspace["specs"],
            "--out", out_union,
        )
        with open(out_union / "scores.csv", newline="") as fh:
            union_rows = list(csv.DictReader(fh))
        assert [r["doc_id"] for r in union_rows] == ["skirt-demo", "skirt-demo-copy"]
        assert union_rows[0]["tree_f1"] == union_rows[1]["tree_f1"] == "1.000000"


class TestPermuteCli:
    def test_writes_k_docs(self, workspace, capsys):
        out = workspace["out"] / "perms"
        code = run(
            "permute",
            "--doc", workspace["corpus"] / "skirt-demo.json",
            "--seed", "42",
            "--k", "3",
            "--out", out,
        )
        assert code == 0
        files = sorted(out.glob("*.json"))
        assert len(files) == 3


class TestInjectErrorsCli:
    def test_inject_and_report_count(self, workspace, capsys):
        out = workspace["out"] / "corrupted.json"
        out.parent.mkdir(parents=True, exist_ok=True)
        code = run(
            "inject-errors",
            "--doc", workspace["corpus"] / "skirt-demo.json",
            "--spec", workspace["specs"] / "skirt.json",
            "--seed", "7",
            "--swap", "1",
            "--drop", "1",
            "--out", out,
        )
        assert code == 0
        assert "applied 2 edits" in capsys.readouterr().out
        doc = json.loads(out.read_text())
        assert len(doc["steps"]) == 4

    def test_infeasible_plan_fails(self, workspace, tmp_path, capsys):
        doc = {"pattern_id": "skirt", "doc_id": "tiny", "steps": ["Sew (A) to (B)."]}
        path = tmp_path / "tiny.json"
        path.write_text(json.dumps(doc))
        code = run(
            "inject-errors",
            "--doc", path,
            "--spec", workspace["specs"] / "skirt.json",
            "--seed", "1",
            "--drop", "1",
            "--out", tmp_path / "o.json",
        )
        assert code == 1


class TestCorrelateCli:
    def test_correlate(self, tmp_path, capsys):
        scores = tmp_path / "scores.csv"
        errors = tmp_path / "errors.csv"
        with open(scores, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["doc_id", "n_steps", "tree_f1"])
            for i in range(5):
                w.writerow([f"d{i}", 10, 1.0 - i / 10])
        with open(errors, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["doc_id", "errors"])
            for i in range(5):
                w.writerow([f"d{i}", i])
        code = run("correlate", "--scores", scores, "--errors", errors, "--columns", "tree_f1")
        assert code == 0
        assert "r=-1.0000" in capsys.readouterr().out


class TestRoundtripCli:
    def test_all_fixtures_pass(self, capsys):
        assert run("roundtrip", "--grammars", FIXTURES / "grammars") == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 6 and "FAIL" not in out


class TestAggregateRatingsCli:
    def test_aggregate(self, tmp_path, capsys):
        ratings = tmp_path / "ratings.csv"
        with open(ratings, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["doc_id", "step_index", "question", "rating"])
            for i, r in enumerate((1, 3, 5)):
                w.writerow(["d", i, "S1", r])
        out = tmp_path / "summary.csv"
        assert run("aggregate-ratings", "--ratings", ratings, "--out", out) == 0
        with open(out, newline="") as fh:
            (row,) = list(csv.DictReader(fh))
        assert row["S1_mean"] == "3.000000"
        assert row["S1_above3"] == row["S1_below3"] == "0.333333"

    def test_malformed_row(self, tmp_path):
        ratings = tmp_path / "ratings.csv"
        ratings.write_text("doc_id,step_index,question,rating\nd,0,S1,9\n")
        assert run("aggregate-ratings", "--ratings", ratings, "--out", tmp_path / "o.csv") == 1


class TestDeterminism:
    def test_score_byte_identical_across_runs_and_workers(self, workspace, tmp_path, capsys):
        outputs = []
        for index, workers in enumerate((1, 3)):
            out = tmp_path / f"run{index}"
            run(
                "score",
                "--corpus", workspace["corpus"],
                "--grammars", workspace["grammars"],
                "--specs", workspace["specs"],
                "--refs", workspace["refs"],
                "--out", out,
                "--workers", str(workers),
            )
            outputs.append((out / "scores.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_permute_byte_identical(self, workspace, tmp_path, capsys):
        blobs = []
        for index in range(2):
            out = tmp_path / f"p{index}"
            run(
                "permute",
                "--doc", workspace["corpus"] / "skirt-demo.json",
                "--seed", "42", "--k", "4", "--out", out,
            )
            blobs.append(b"".join(p.read_bytes() for p in sorted(out.glob("*.json"))))
        assert blobs[0] == blobs[1]
