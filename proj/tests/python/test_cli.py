"""End-to-end tests for the fscpu command-line tool."""

import json
import os
import subprocess

import pytest

CLI = os.environ.get("FSCPU_CLI", "fscpu")


def run_cli(*args, cwd=None):
    return subprocess.run([CLI, *args], capture_output=True, text=True, cwd=cwd)


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("synth")
    result = run_cli(
        "synth",
        "--cluster-assumption",
        "--labeled-rate", "0.4",
        "--neg", "8",
        "--pos", "1",
        "--seed", "0",
        "--out", str(path / "data.csv"),
    )
    assert result.returncode == 0, result.stderr
    return path


def test_synth_writes_csv_and_sidecar(synth_dir):
    csv_path = synth_dir / "data.csv"
    sidecar = synth_dir / "data.csv.truth.json"
    assert csv_path.exists()
    assert sidecar.exists()

    header = csv_path.open().readline().strip().split(",")
    assert len(header) == 51
    assert header[-1] == "label"
    with csv_path.open() as fh:
        n_rows = sum(1 for _ in fh) - 1
    assert n_rows == 4500

    truth = json.loads(sidecar.read_text())
    assert len(truth["relevant_features"]) == 25
    assert len(truth["positive_rows"]) == 500
    assert truth["generator"]["seed"] == 0


def test_synth_is_deterministic(tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    for out in (out_a, out_b):
        result = run_cli("synth", "--outlier", "--labeled-rate", "0.1", "--seed", "5",
                         "--out", str(out))
        assert result.returncode == 0, result.stderr
    assert out_a.read_text() == out_b.read_text()

    truth = json.loads((tmp_path / "a.csv.truth.json").read_text())
    assert len(truth["positive_rows"]) == 500
    assert truth["generator"]["cluster_assumption"] is False


def test_select_eval_round_trip(synth_dir, tmp_path):
    out_dir = tmp_path / "run"
    result = run_cli(
        "select", str(synth_dir / "data.csv"),
        "--label-col", "label",
        "--budget", "25",
        "--iters", "5",
        "--clusters", "4",
        "--em-max-iter", "8",
        "--seed", "0",
        "--out", str(out_dir),
    )
    assert result.returncode == 0, result.stderr

    selected = (out_dir / "selected_features.txt").read_text().splitlines()
    assert len(selected) == 25

    run_result = json.loads((out_dir / "run_result.json").read_text())
    assert len(run_result["selected_features"]) == 25
    assert run_result["config"]["iterations"] == 5
    assert run_result["config"]["seed"] == 0
    assert run_result["evaluations"] == 10
    assert "wall_seconds" in run_result

    trace = (out_dir / "theta_trace.csv").read_text().splitlines()
    assert trace[0].split(",")[:2] == ["iteration", "theta_0"]
    assert len(trace[0].split(",")) == 51

    # FSR against the ground-truth sidecar prints a single number
    result = run_cli("eval", str(out_dir / "selected_features.txt"),
                     str(synth_dir / "data.csv.truth.json"))
    assert result.returncode == 0, result.stderr
    value = float(result.stdout.strip())
    assert 0.0 <= value <= 1.0


def test_select_is_reproducible(synth_dir, tmp_path):
    outputs = []
    for name in ("r1", "r2"):
        out_dir = tmp_path / name
        result = run_cli(
            "select", str(synth_dir / "data.csv"),
            "--label-col", "label",
            "--budget", "25",
            "--iters", "3",
            "--clusters", "3",
            "--em-max-iter", "5",
            "--seed", "7",
            "--out", str(out_dir),
        )
        assert result.returncode == 0, result.stderr
        outputs.append(out_dir)

    a, b = outputs
    assert (a / "selected_features.txt").read_text() == (b / "selected_features.txt").read_text()
    assert (a / "theta_trace.csv").read_text() == (b / "theta_trace.csv").read_text()
    ra = json.loads((a / "run_result.json").read_text())
    rb = json.loads((b / "run_result.json").read_text())
    ra.pop("wall_seconds")
    rb.pop("wall_seconds")
    assert ra == rb


def test_select_rerun_from_embedded_config(synth_dir, tmp_path):
    first = tmp_path / "first"
    result = run_cli(
        "select", str(synth_dir / "data.csv"),
        "--label-col", "label",
        "--budget", "25",
        "--iters", "3",
        "--clusters", "3",
        "--em-max-iter", "5",
        "--seed", "11",
        "--out", str(first),
    )
    assert result.returncode == 0, result.stderr

    # re-run purely from the embedded config of the first run's artifact
    second = tmp_path / "second"
    result = run_cli(
        "select", str(synth_dir / "data.csv"),
        "--label-col", "label",
        "--config", str(first / "run_result.json"),
        "--out", str(second),
    )
    assert result.returncode == 0, result.stderr
    assert (first / "selected_features.txt").read_text() == \
        (second / "selected_features.txt").read_text()
    assert (first / "theta_trace.csv").read_text() == (second / "theta_trace.csv").read_text()


def test_select_missing_label_column_exits_3(synth_dir, tmp_path):
    result = run_cli(
        "select", str(synth_dir / "data.csv"),
        "--label-col", "not_a_column",
        "--budget", "25",
        "--out", str(tmp_path / "out"),
    )
    assert result.returncode == 3
    assert "not_a_column" in result.stderr


def test_select_bad_flags_exit_2(synth_dir, tmp_path):
    result = run_cli("select", str(synth_dir / "data.csv"), "--label-col", "label",
                     "--budget", "0", "--out", str(tmp_path / "out"))
    assert result.returncode == 2

    result = run_cli("select", str(synth_dir / "data.csv"), "--label-col", "label",
                     "--budget", "25", "--objective", "nonsense",
                     "--out", str(tmp_path / "out"))
    assert result.returncode == 2

    result = run_cli("select", "--budget", "25")  # missing required arguments
    assert result.returncode == 2


def test_synth_requires_exactly_one_family(tmp_path):
    result = run_cli("synth", "--labeled-rate", "0.1", "--out", str(tmp_path / "x.csv"))
    assert result.returncode == 2
    result = run_cli("synth", "--cluster-assumption", "--outlier",
                     "--labeled-rate", "0.1", "--out", str(tmp_path / "y.csv"))
    assert result.returncode == 2


def test_check_passes_and_honors_trials():
    result = run_cli("check", "--trials", "50")
    assert result.returncode == 0, result.stdout + result.stderr
    assert "oracle_equivalence" in result.stdout
    assert "54 instances" in result.stdout  # 50 random + 4 crafted
    assert "all checks passed" in result.stdout


def test_check_negative_control_fails():
    result = run_cli("check", "--trials", "50", "--inject-faulty-objective")
    assert result.returncode == 1
    assert "FAIL" in result.stdout


def test_objective_mi_mode_populates_mi_fields(synth_dir, tmp_path):
    out_dir = tmp_path / "mi_run"
    result = run_cli(
        "select", str(synth_dir / "data.csv"),
        "--label-col", "label",
        "--budget", "25",
        "--iters", "3",
        "--clusters", "3",
        "--em-max-iter", "5",
        "--objective", "fscpu-mi",
        "--out", str(out_dir),
    )
    assert result.returncode == 0, result.stderr
    run_result = json.loads((out_dir / "run_result.json").read_text())
    assert run_result["config"]["objective"] == "fscpu-mi"
    assert "best_mi" in run_result
    assert run_result["best_mi"] >= 0.0
