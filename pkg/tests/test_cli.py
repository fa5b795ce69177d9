"""Tests for the command-line interface.

Runs the entry point in-process so the tests stay fast, with a single
subprocess check of the installed console script.  The contract under test:
document formats (CSV with # headers, JSON with schema tag), exit codes
(0 ok, 1 verification failure, 2 parameter error, 3 numerical failure),
atomic output files, and byte-identical determinism regardless of thread
count.
"""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

import fracppk
from fracppk import NonConvergence, OrderParams, ppok_pmf, tfppok_pmf
from fracppk.cli import main

P3 = OrderParams(k=3, lam=2.0)


def run_cli(*argv):
    return main(list(argv))


def parse_csv(text):
    headers = [ln for ln in text.splitlines() if ln.startswith("#")]
    body = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return headers, body[0].split(","), [ln.split(",") for ln in body[1:]]


class TestPmfCommand:
    def test_csv_document(self, capsys):
        assert run_cli("pmf", "-k", "3", "--lambda", "2.0", "-t", "1.0", "--nmax", "10") == 0
        headers, columns, rows = parse_csv(capsys.readouterr().out)
        assert headers[0] == f"# fracppk {fracppk.__version__}"
        assert headers[1] == "# command: pmf"
        assert "k=3" in headers[2] and "lam=2.0" in headers[2]
        assert columns == ["n", "probability"]
        assert rows[-1][0] == "truncation_mass"
        for n_str, p_str in rows[:-1]:
            assert float(p_str) == pytest.approx(ppok_pmf(P3, int(n_str), 1.0), rel=1e-15)

    def test_json_document(self, capsys):
        assert run_cli("pmf", "--format", "json", "--nmax", "8") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["schema"] == 1
        assert doc["version"] == fracppk.__version__
        assert doc["kind"] == "pmf_table"
        assert doc["params"]["k"] == 3
        assert len(doc["probabilities"]) == 9

    def test_fractional_variant(self, capsys):
        assert run_cli(
            "pmf", "--variant", "tf", "--beta", "0.7", "--nmax", "6", "--format", "json"
        ) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["params"]["beta"] == 0.7
        assert doc["probabilities"][2] == pytest.approx(tfppok_pmf(P3, 2, 1.0, 0.7), rel=1e-12)

    def test_variant_requires_index(self, capsys):
        assert run_cli("pmf", "--variant", "tf") == 2
        assert "parameter error" in capsys.readouterr().err

    def test_ttsf_table_is_parameter_error(self, capsys):
        code = run_cli("pmf", "--variant", "ttsf", "--alpha", "0.7", "--beta", "0.8")
        assert code == 2
        assert "parameter error" in capsys.readouterr().err

    def test_numerical_failure_exit_code(self, monkeypatch, capsys):
        def boom(*args, **kwargs):
            raise NonConvergence("series refused to converge")

        monkeypatch.setattr("fracppk.cli.pmf_table", boom)
        assert run_cli("pmf") == 3
        assert "numerical failure" in capsys.readouterr().err

    def test_output_file_atomic(self, tmp_path, capsys):
        out = tmp_path / "table.csv"
        assert run_cli("pmf", "--nmax", "5", "--out", str(out)) == 0
        assert out.exists()
        assert [p.name for p in tmp_path.iterdir()] == ["table.csv"]
        assert capsys.readouterr().out == ""


class TestSampleCommand:
    def test_counts_csv(self, capsys):
        assert run_cli("sample", "-N", "50", "--seed", "3") == 0
        _, columns, rows = parse_csv(capsys.readouterr().out)
        assert columns == ["count"]
        assert len(rows) == 50
        assert all(int(r[0]) >= 0 for r in rows)

    def test_deterministic_across_runs(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert run_cli(
                "sample", "--variant", "tf", "--beta", "0.7", "-N", "200",
                "--seed", "9", "--out", str(out),
            ) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_thread_count_does_not_change_output(self, tmp_path, monkeypatch):
        outs = []
        for threads in ("1", "4"):
            monkeypatch.setenv("FRACPPK_THREADS", threads)
            out = tmp_path / f"t{threads}.csv"
            assert run_cli("sample", "-N", "500", "--seed", "11", "--out", str(out)) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_path_json(self, capsys):
        assert run_cli("sample", "--path", "--format", "json", "--seed", "4") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["kind"] == "event_path"
        times = doc["times"]
        assert times == sorted(times)
        assert all(1 <= m <= 3 for m in doc["marks"])

    def test_path_requires_base_variant(self, capsys):
        assert run_cli("sample", "--path", "--variant", "tf", "--beta", "0.5") == 2
        capsys.readouterr()

    def test_sampled_mean_sane(self, capsys):
        assert run_cli("sample", "-N", "2000", "--seed", "5") == 0
        _, _, rows = parse_csv(capsys.readouterr().out)
        counts = np.array([int(r[0]) for r in rows])
        assert abs(counts.mean() - 12.0) < 4.0 * counts.std(ddof=1) / np.sqrt(2000)


class TestFieldCommand:
    def test_csv_columns(self, capsys):
        assert run_cli("field", "--window", "0,0,2,1", "--seed", "6") == 0
        _, columns, rows = parse_csv(capsys.readouterr().out)
        assert columns == ["x1", "x2", "mark"]
        for row in rows:
            assert 0.0 <= float(row[0]) < 2.0
            assert 0.0 <= float(row[1]) < 1.0

    def test_json_window_echo(self, capsys):
        assert run_cli("field", "--format", "json", "--window", "0,0,1,1") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["kind"] == "field"
        assert doc["window_lo"] == [0.0, 0.0]
        assert doc["window_hi"] == [1.0, 1.0]

    def test_bad_window(self, capsys):
        assert run_cli("field", "--window", "0,0,1") == 2
        assert run_cli("field", "--window", "0,zebra,1,1") == 2
        capsys.readouterr()


class TestVerifyCommand:
    def test_governing_suite_passes(self, capsys):
        assert run_cli("verify", "--suite", "governing") == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 2
        assert "governing/tf" in out and "governing/sf" in out

    def test_gof_gate_tracks_sample_size(self, capsys):
        # the TV gate is calibrated to 0.01 at N = 1e5 and widens like
        # 1/sqrt(N), so a correct sampler passes even at small N
        assert run_cli("verify", "--suite", "gof", "-N", "2000", "--seed", "12") == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 3

    def test_gof_detects_biased_clock(self, capsys):
        # a coarse first-crossing grid biases the time-fractional clock by
        # O(step); the suite must flag that case and only that case
        assert run_cli(
            "verify", "--suite", "gof", "-N", "2000", "--seed", "12", "--step", "0.25"
        ) == 1
        out = capsys.readouterr().out
        assert "FAIL gof/tf-0.7" in out
        assert "PASS gof/ppok" in out and "PASS gof/sf-0.7" in out

    def test_negative_control(self, capsys):
        assert run_cli("verify", "--negative-control", "-N", "4000", "--seed", "13") == 0
        out = capsys.readouterr().out
        assert "PASS negative-control" in out
        assert "deviates" in out

    def test_martingale_single_spec(self, capsys):
        assert run_cli(
            "verify", "--suite", "martingale", "--spec", "gamma", "-N", "3000",
            "--seed", "14",
        ) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 1 and "martingale/gamma" in out

    def test_rejects_nonpositive_sample_size(self, capsys):
        assert run_cli("verify", "--suite", "gof", "-N", "0") == 2
        capsys.readouterr()


class TestEntryPoint:
    def test_version_flag(self):
        with pytest.raises(SystemExit) as info:
            run_cli("--version")
        assert info.value.code == 0

    def test_console_script(self):
        result = subprocess.run(
            [sys.executable, "-m", "fracppk.cli", "--version"],
            capture_output=True,
            text=True,
            env={**os.environ},
        )
        assert result.returncode == 0
        assert f"fracppk {fracppk.__version__}" in result.stdout
