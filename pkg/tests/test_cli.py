"""End-to-end CLI tests: report shapes, determinism, exit codes, cache."""

import json
from pathlib import Path

import pytest

from bcinv.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fields"
QM5 = str(FIXTURES / "q(-5).field")
Q = str(FIXTURES / "q.field")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


class TestReports:
    def test_classgroup_example(self, capsys):
        code, report = run_json(
            capsys, "classgroup", "--field", QM5, "--bound", "50", "--no-cache"
        )
        assert code == 0
        assert report["h_narrow"] == 2
        assert report["structure"] == [2]
        assert report["stabilized_at"] == 2
        assert report["provenance"] == "computed"

    def test_split_recover_example(self, capsys):
        code, report = run_json(capsys, "split-recover", "--field", QM5, "--prime", "11")
        assert code == 0
        assert report["verdict"] == "inert"
        assert report["oracle_agrees"] is True
        assert report["generator"] == 2

    def test_compare_example(self, capsys):
        code, report = run_json(
            capsys,
            "compare",
            "--left", str(FIXTURES / "q(2).field"),
            "--right", str(FIXTURES / "q(3).field"),
            "--bound", "50",
        )
        assert code == 0
        assert report["verdict"] == "distinguished"
        assert report["invariant"] == "narrow_class_number"
        assert "1" in report["witness"] and "2" in report["witness"]

    def test_dynamics_report(self, capsys):
        code, report = run_json(capsys, "dynamics", "--field", Q, "--bound", "10")
        assert code == 0
        assert report["frequencies"] == ["2", "3", "5", "7"]
        assert report["fixed_rank"] == 0
        assert report["independent"] is True

    def test_prim_report(self, capsys):
        code, report = run_json(
            capsys,
            "prim", "--field", Q, "--bound", "12",
            "--zero", "3,5,7,11", "--precision", "2", "--height", "10000",
        )
        assert code == 0
        assert report["rank"] == 4
        assert report["rows"] == [
            [0, 1, 0, 0, 1],
            [0, 0, 1, 0, 0],
            [0, 0, 0, 1, 1],
            [0, 0, 0, 0, 2],
        ]
        assert report["stable"] is False

    def test_reps_report(self, capsys):
        code, report = run_json(
            capsys, "reps", "--field", QM5, "--bound", "20", "--characters", "3"
        )
        assert code == 0
        assert report["dimension"] == 2
        assert report["all_irreducible"] is True
        assert report["seed"] == 1729

    def test_selftest(self, capsys):
        code, report = run_json(capsys, "selftest")
        assert code == 0
        assert report["ok"] is True
        assert all(check["ok"] for check in report["checks"])
        assert len(report["checks"]) == 5

    def test_octic_pair_marked_ingested(self, capsys):
        code, report = run_json(
            capsys,
            "compare",
            "--left", str(FIXTURES / "octic-a.field"),
            "--right", str(FIXTURES / "octic-b.field"),
            "--bound", "13",
        )
        assert code == 0
        assert report["verdict"] == "distinguished"
        assert "4" in report["witness"] and "2" in report["witness"]
        assert report["provenance"] == {
            "left": "ingested, not computed",
            "right": "ingested, not computed",
        }

    def test_table_classgroup_marked_ingested(self, capsys):
        code, report = run_json(
            capsys, "classgroup", "--field", str(FIXTURES / "octic-a.field"),
            "--bound", "13", "--no-cache",
        )
        assert code == 0
        assert report["h_narrow"] == 4
        assert report["provenance"] == "ingested, not computed"


class TestDeterminism:
    def test_byte_identical_reports(self, capsys):
        _, first, _ = run(capsys, "reps", "--field", QM5, "--bound", "20")
        _, second, _ = run(capsys, "reps", "--field", QM5, "--bound", "20")
        assert first == second

    def test_seed_changes_inputs_not_stability(self, capsys):
        _, a1, _ = run(capsys, "reps", "--field", QM5, "--bound", "20", "--seed", "7")
        _, a2, _ = run(capsys, "reps", "--field", QM5, "--bound", "20", "--seed", "7")
        assert a1 == a2

    def test_keys_sorted(self, capsys):
        _, out, _ = run(capsys, "classgroup", "--field", QM5, "--no-cache")
        keys = list(json.loads(out))
        assert keys == sorted(keys)

    def test_pretty_is_not_json(self, capsys):
        code, out, _ = run(
            capsys, "classgroup", "--field", QM5, "--no-cache", "--pretty"
        )
        assert code == 0
        assert "{" not in out
        assert any(line.startswith("h_narrow") for line in out.splitlines())


class TestExitCodes:
    def test_ingestion_error_is_3(self, capsys):
        code, out, _ = run(capsys, "classgroup", "--field", "absent.field")
        assert code == 3
        assert json.loads(out)["kind"] == "ingestion"

    def test_parse_error_carries_line(self, capsys, tmp_path):
        bad = tmp_path / "bad.field"
        bad.write_text("kind = quadratic\nd = twelve\n")
        code, out, _ = run(capsys, "classgroup", "--field", str(bad))
        assert code == 3
        assert json.loads(out)["line"] == 2

    def test_unstabilized_bound_is_2(self, capsys):
        code, out, _ = run(capsys, "reps", "--field", QM5, "--bound", "1")
        assert code == 2
        assert json.loads(out)["kind"] == "bound_too_small"

    def test_unknown_flag_is_usage(self, capsys):
        code, out, err = run(capsys, "classgroup", "--field", QM5, "--bogus")
        assert code == 1
        assert out == ""
        assert "usage" in err
        assert "--bogus" in err

    def test_unknown_subcommand_is_usage(self, capsys):
        code, _, err = run(capsys, "frobnicate")
        assert code == 1
        assert "usage" in err

    def test_other_errors_are_1(self, capsys):
        code, out, _ = run(capsys, "dynamics", "--field", QM5, "--bound", "2000")
        assert code == 1
        assert json.loads(out)["kind"] == "other"


class TestCache:
    def test_cache_round_trip_same_bytes(self, capsys, tmp_path):
        args = ("classgroup", "--field", QM5, "--bound", "40", "--cache-dir", str(tmp_path))
        code, first, _ = run(capsys, *args)
        assert code == 0
        assert any(tmp_path.iterdir())
        code, second, _ = run(capsys, *args)
        assert code == 0
        assert first == second

    def test_tampered_cache_recomputes(self, capsys, tmp_path):
        args = ("classgroup", "--field", QM5, "--bound", "40", "--cache-dir", str(tmp_path))
        _, first, _ = run(capsys, *args)
        for entry in tmp_path.iterdir():
            entry.write_text(entry.read_text().replace("order 2", "order 9"))
        _, second, _ = run(capsys, *args)
        assert first == second

    def test_no_cache_leaves_no_files(self, capsys, tmp_path):
        run(
            capsys,
            "classgroup", "--field", QM5, "--bound", "40",
            "--cache-dir", str(tmp_path), "--no-cache",
        )
        assert not any(tmp_path.iterdir())
