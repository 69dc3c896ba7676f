import json

import pytest
from pydantic import ValidationError

from saddlecount.errors import MalformedSpec
from saddlecount.operations.models import LedgerRow, ScanRow
from saddlecount.storage.csv_interface import CsvInterface
from saddlecount.storage.manifest import write_manifest
from saddlecount.storage.surfaces import load_surface_spec


def test_csv_keeps_every_float_digit(tmp_path):
    path = tmp_path / "scan.csv"
    rows = [ScanRow(T=0.1 + 0.2, N=3, predicted=float("nan"), residual=float("nan"))]
    assert CsvInterface(ScanRow).write(path, rows) == 1
    assert path.read_text().splitlines() == ["T,N,predicted,residual", "0.30000000000000004,3,nan,nan"]
    back = CsvInterface(ScanRow).read(path)
    assert back[0].T == 0.1 + 0.2


def test_csv_validates_plain_dicts(tmp_path):
    path = tmp_path / "ledger.csv"
    CsvInterface(LedgerRow).write(path, [{"variant": "sector", "name": "sigma", "value": 11}])
    assert CsvInterface(LedgerRow).read(path)[0].value == 11.0
    with pytest.raises(ValidationError):
        CsvInterface(LedgerRow).write(path, [{"variant": "sector"}])


def test_manifest_has_no_clock(tmp_path):
    path = write_manifest(tmp_path / "run.manifest.json", "scan", {"T": 2.0, "threads": 1}, seed=5)
    manifest = json.loads(path.read_text())
    assert set(manifest) == {"command", "params", "seed", "version"}
    assert manifest["seed"] == 5
    first = path.read_bytes()
    write_manifest(path, "scan", {"threads": 1, "T": 2.0}, seed=5)
    assert path.read_bytes() == first


def test_bad_json_is_malformed(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(MalformedSpec):
        load_surface_spec(path)
