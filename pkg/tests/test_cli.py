import json

import pytest

from grassblow.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEnum:
    def test_full_label_set(self, capsys):
        code, out, _ = run(capsys, "enum", "--p", "2", "--n", "4")
        assert code == 0
        assert json.loads(out)["labels"] == [
            [2, 1],
            [3, 1],
            [3, 2],
            [4, 1],
            [4, 2],
            [4, 3],
        ]

    def test_stratum(self, capsys):
        code, out, _ = run(capsys, "enum", "--s", "2", "--p", "2", "--n", "4", "--k", "2")
        assert code == 0
        assert json.loads(out)["labels"] == [[4, 3]]

    def test_range_error_exit_2(self, capsys):
        code, _, err = run(capsys, "enum", "--s", "2", "--p", "2", "--n", "4", "--k", "5")
        assert code == 2 and "outside" in err

    def test_usage_error_exit_2(self, capsys):
        code, _, _ = run(capsys, "enum", "--p", "2")
        assert code == 2


class TestVerify:
    def test_orbits_by_rank(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "orbits", "--r", "2")
        assert code == 0
        lines = [json.loads(l) for l in out.strip().split("\n")]
        assert all(l["status"] == "pass" for l in lines)
        assert any("orbit-signature-count[8]" == l["check"] for l in lines)

    def test_chart_units_needs_complementary_split(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--suite", "chart-units", "--s", "4", "--p", "3", "--n", "6"
        )
        assert code == 1  # suite not applicable reports a failing check

    def test_chart_units_small(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--suite", "chart-units", "--s", "2", "--p", "2", "--n", "4"
        )
        assert code == 0

    def test_diagram_deterministic(self, capsys):
        args = (
            "verify", "--suite", "diagram", "--s", "2", "--p", "2", "--n", "4",
            "--samples", "10", "--seed", "7",
        )
        code1, out1, _ = run(capsys, *args)
        code2, out2, _ = run(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_report_lines_are_json(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--suite", "flow", "--s", "2", "--p", "2", "--n", "4",
            "--samples", "5", "--seed", "1",
        )
        assert code == 0
        for line in out.strip().split("\n"):
            rec = json.loads(line)
            assert set(rec) == {"suite", "check", "params", "status", "witness"}

    def test_thread_pool_output_identical(self, capsys, monkeypatch):
        args = (
            "verify", "--suite", "chart-units", "--s", "2", "--p", "2", "--n", "4",
        )
        monkeypatch.setenv("GRASSBLOW_THREADS", "3")
        code1, out1, _ = run(capsys, *args)
        monkeypatch.setenv("GRASSBLOW_THREADS", "1")
        code2, out2, _ = run(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "report.jsonl"
        code, out, _ = run(
            capsys, "verify", "--suite", "orbits", "--r", "1", "--out", str(path)
        )
        assert code == 0 and out == ""
        assert path.read_text().count("\n") == 3


class TestFlow:
    def test_random_generic(self, capsys):
        code, out, _ = run(
            capsys, "flow", "--s", "2", "--p", "2", "--n", "4", "--random", "--seed", "1"
        )
        assert code == 0
        rec = json.loads(out)
        assert rec["degree"] == 2 and rec["components"] == [0, 2]

    def test_fixed_point_flagged_not_error(self, capsys, tmp_path):
        path = tmp_path / "point.json"
        path.write_text(json.dumps([["1", "0", "0", "0"], ["0", "1", "0", "0"]]))
        code, out, _ = run(
            capsys, "flow", "--s", "2", "--p", "2", "--n", "4", "--point", str(path)
        )
        assert code == 0
        rec = json.loads(out)
        assert rec["degenerate"] is True and rec["component"] == 0

    def test_bad_shape_exit_2(self, capsys, tmp_path):
        path = tmp_path / "point.json"
        path.write_text(json.dumps([["1", "0", "0"], ["0", "1", "0"]]))
        code, _, err = run(
            capsys, "flow", "--s", "2", "--p", "2", "--n", "4", "--point", str(path)
        )
        assert code == 2

    def test_determinism(self, capsys):
        args = ("flow", "--s", "2", "--p", "2", "--n", "4", "--random", "--seed", "9")
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2
