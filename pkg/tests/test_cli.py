import csv
import json
import subprocess
import sys

import pytest

from strikedip.cli import EXIT_CONFIG, EXIT_DEGENERATE, EXIT_IO, main


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--scene", "box", "--points-per-face", "4000", "--out-dir", str(out)]) == 0
    return out


def test_synth_writes_cloud_and_truth(synth_dir):
    assert (synth_dir / "cloud.ply").exists()
    with open(synth_dir / "truth.csv", newline="") as fh:
        assert len(list(csv.DictReader(fh))) == 6


def test_run_and_score(tmp_path, synth_dir, capsys):
    out = tmp_path / "run"
    code = main(["run", "--input", str(synth_dir / "cloud.ply"), "--truth", str(synth_dir / "truth.csv"),
                 "--out-dir", str(out), "--binary-ply"])
    assert code == 0
    assert "z_run" in capsys.readouterr().out
    report = json.loads((out / "report.json").read_text())
    assert len(report["quality"]["matching"]) == 6
    assert (out / "segmented.ply").read_bytes().startswith(b"ply\nformat binary_little_endian")
    assert main(["score", "--report", str(out / "report.json"), "--truth", str(synth_dir / "truth.csv")]) == 0
    scored = json.loads(capsys.readouterr().out)
    assert scored["z_run"] == pytest.approx(report["quality"]["z_run"], abs=1e-12)


def test_sweep_subcommand(tmp_path, synth_dir):
    csv_path = tmp_path / "theta.csv"
    code = main(["sweep", "--input", str(synth_dir / "cloud.ply"), "--truth", str(synth_dir / "truth.csv"),
                 "--factor", "theta", "--start", "0", "--end", "30", "--step", "3",
                 "--csv", str(csv_path)])
    assert code == 0
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 11 and rows[0]["schema_version"] == "1"


def test_exit_codes(tmp_path, synth_dir, capsys):
    ply = str(synth_dir / "cloud.ply")
    assert main(["run", "--input", ply, "--zeta", "0", "--out-dir", str(tmp_path)]) == EXIT_CONFIG
    assert main(["run", "--input", str(tmp_path / "missing.ply"), "--out-dir", str(tmp_path)]) == EXIT_IO
    (tmp_path / "bad.ply").write_bytes(b"not a ply\n")
    assert main(["run", "--input", str(tmp_path / "bad.ply"), "--out-dir", str(tmp_path)]) == EXIT_IO
    assert main(["run", "--input", ply, "--sigma", "1e-6", "--out-dir", str(tmp_path)]) == EXIT_DEGENERATE
    assert main(["sweep", "--input", ply, "--factor", "k", "--start", "1", "--end", "3",
                 "--step", "0", "--out-dir", str(tmp_path)]) == EXIT_CONFIG
    (tmp_path / "r.json").write_text("{}")
    assert main(["score", "--report", str(tmp_path / "r.json"),
                 "--truth", str(synth_dir / "truth.csv")]) == EXIT_IO
    err = capsys.readouterr().err
    assert "error" in err


def test_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as info:
        main(["run"])
    assert info.value.code == 2


def test_module_entry_point(synth_dir):
    proc = subprocess.run([sys.executable, "-m", "strikedip", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "strikedip" in proc.stdout
