import csv
import json
import math

import pytest

from main import main


def _records(stderr: str) -> list[dict]:
    return [json.loads(line) for line in stderr.splitlines() if line.startswith("{")]


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_count_on_the_torus(capsys, surfaces_dir, tmp_path):
    code, out, _ = _run(capsys, ["count", str(surfaces_dir / "torus.json"), "-T", "2", "--out", str(tmp_path)])
    assert code == 0
    assert out.strip() == "8"
    with (tmp_path / "count.csv").open() as handle:
        rows = list(csv.DictReader(handle))
    assert rows[0]["N"] == "8"
    manifest = json.loads((tmp_path / "count.manifest.json").read_text())
    assert manifest["command"] == "count"
    assert manifest["params"]["T"] == 2.0


def test_ellipse_count(capsys, surfaces_dir, tmp_path):
    code, out, _ = _run(capsys, ["count", str(surfaces_dir / "torus.json"), "-T", "1", "--g", "2", "0", "0", "0.5",
                                 "--out", str(tmp_path)])
    assert code == 0
    assert out.strip() == "2"


def test_validate_reports_genus(capsys, surfaces_dir, tmp_path):
    code, out, _ = _run(capsys, ["validate", str(surfaces_dir / "l_origami.json"), "--out", str(tmp_path)])
    assert code == 0
    report = json.loads(out)
    assert report["genus"] == 2
    assert report["singularities"] == [3]
    assert report["area"] == 3.0


def test_enumerate_writes_every_connection(capsys, surfaces_dir, tmp_path):
    code, out, _ = _run(capsys, ["enumerate", str(surfaces_dir / "l_origami.json"), "-T", "2", "--out", str(tmp_path)])
    assert code == 0
    assert out.strip() == "24"
    with (tmp_path / "enumerate.csv").open() as handle:
        assert len(list(csv.DictReader(handle))) == 24


def test_exponents_ledger(capsys, tmp_path):
    code, out, _ = _run(capsys, ["exponents", "--lambda", "1", "--out", str(tmp_path)])
    assert code == 0
    lines = out.splitlines()
    assert "sector sigma 11.0" in lines
    assert f"sector kappa_final {1.0 / 11.0!r}" in lines
    assert "uniform sigma 17.0" in lines

    code, out, _ = _run(capsys, ["exponents", "--lambda", "1", "--uniform", "--out", str(tmp_path)])
    assert code == 0
    assert all(line.startswith("uniform ") for line in out.splitlines())


def test_bad_gluing_exits_with_config_error(capsys, surfaces_dir, tmp_path):
    code, _, err = _run(capsys, ["validate", str(surfaces_dir / "bad_gluing.json"), "--out", str(tmp_path)])
    assert code == 2
    record = _records(err)[-1]
    assert record["error"] == "NonMatchingEdge"
    assert record["exit_code"] == 2


def test_invalid_sector_is_a_config_error(capsys, surfaces_dir, tmp_path):
    code, _, err = _run(capsys, ["count", str(surfaces_dir / "torus.json"), "-T", "2", "--phi1", "1", "--phi2", "0",
                                 "--out", str(tmp_path)])
    assert code == 2
    assert _records(err)[-1]["error"] == "InvalidParameter"


def test_short_grid_is_a_computation_error(capsys, surfaces_dir, tmp_path):
    code, _, err = _run(capsys, ["fit", str(surfaces_dir / "torus.json"), "--grid", "1", "2", "3",
                                 "--out", str(tmp_path)])
    assert code == 3
    assert _records(err)[-1]["error"] == "InsufficientData"


def test_scan_output_does_not_depend_on_threads(capsys, surfaces_dir, tmp_path):
    outputs = []
    for threads in ("1", "2"):
        out_dir = tmp_path / f"threads{threads}"
        code, _, _ = _run(capsys, ["scan", str(surfaces_dir / "l_origami.json"), "--t-min", "5", "--t-max", "60",
                                   "--points", "12", "--phi1", "0.2", "--phi2", "1.3", "--threads", threads,
                                   "--out", str(out_dir)])
        assert code == 0
        outputs.append((out_dir / "scan.csv").read_bytes())
    assert outputs[0] == outputs[1]


def test_fit_from_scan_csv(capsys, surfaces_dir, tmp_path):
    code, _, _ = _run(capsys, ["scan", str(surfaces_dir / "torus.json"), "--t-min", "10", "--t-max", "150",
                               "--out", str(tmp_path)])
    assert code == 0
    code, out, _ = _run(capsys, ["fit", "--input", str(tmp_path / "scan.csv"), "--out", str(tmp_path)])
    assert code == 0
    report = json.loads(out)
    assert report["c_hat_pi"] == pytest.approx(6.0 / 3.141592653589793, rel=0.03)


def test_scan_fills_predicted_when_the_grid_can_be_fitted(capsys, surfaces_dir, tmp_path):
    code, _, _ = _run(capsys, ["scan", str(surfaces_dir / "torus.json"), "--t-min", "10", "--t-max", "150",
                               "--out", str(tmp_path / "wide")])
    assert code == 0
    with (tmp_path / "wide" / "scan.csv").open() as handle:
        rows = list(csv.DictReader(handle))
    assert all(math.isfinite(float(row["predicted"])) for row in rows)
    assert all(math.isfinite(float(row["residual"])) for row in rows)
    last = rows[-1]
    assert float(last["residual"]) == pytest.approx(float(last["N"]) - float(last["predicted"]))

    code, _, _ = _run(capsys, ["scan", str(surfaces_dir / "torus.json"), "--grid", "1", "2", "3",
                               "--out", str(tmp_path / "short")])
    assert code == 0
    with (tmp_path / "short" / "scan.csv").open() as handle:
        rows = list(csv.DictReader(handle))
    assert [row["N"] for row in rows] == ["4", "8", "16"]
    assert all(math.isnan(float(row["predicted"])) for row in rows)


def test_svconst_writes_samples(capsys, tmp_path):
    code, out, _ = _run(capsys, ["svconst", "--n", "200", "--seed", "7", "--dump-samples", "--out", str(tmp_path)])
    assert code == 0
    report = json.loads(out)
    assert report["n"] == 200
    assert report["seed"] == 7
    assert report["expected"] == pytest.approx(0.6079271018540267)
    assert (tmp_path / "svconst.csv").exists()
    with (tmp_path / "svconst_samples.csv").open() as handle:
        assert len(list(csv.DictReader(handle))) == 200
    assert json.loads((tmp_path / "svconst.manifest.json").read_text())["seed"] == 7


def test_sandwich_command(capsys, surfaces_dir, tmp_path):
    code, out, _ = _run(capsys, ["sandwich", str(surfaces_dir / "l_origami.json"), "--t", "1", "2",
                                 "--theta", "0.2", "0.5", "--phi1", "1.0", "--phi2", "2.2", "--out", str(tmp_path)])
    assert code == 0
    assert out.strip() == "4 checks, 0 violations"


def test_plot_is_deterministic(capsys, surfaces_dir, tmp_path):
    code, _, _ = _run(capsys, ["scan", str(surfaces_dir / "torus.json"), "--t-min", "5", "--t-max", "50",
                               "--points", "10", "--out", str(tmp_path)])
    assert code == 0
    images = []
    for name in ("first", "second"):
        out_dir = tmp_path / name
        code, _, _ = _run(capsys, ["plot", str(tmp_path / "scan.csv"), "--kind", "growth", "--name", "growth",
                                   "--out", str(out_dir)])
        assert code == 0
        assert (out_dir / "growth.csv").exists()
        images.append((out_dir / "growth.svg").read_bytes())
    assert images[0] == images[1]
