import csv
import json
import os

import pytest

from limitcone import errors
from limitcone.cli import main
from limitcone.report import CSV_COLUMNS

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
PANTS = os.path.join(ROOT, "configs", "pants.yaml")
HEXAGON = os.path.join(ROOT, "configs", "hexagon.yaml")
FILES = ("report.json", "curves.csv", "cone.svg")


@pytest.fixture(autouse=True)
def _no_env(monkeypatch):
    monkeypatch.delenv("LIMITCONE_PRECISION_BITS", raising=False)


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


def _report(out):
    with open(os.path.join(out, "report.json")) as fh:
        return json.load(fh)


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_run_pants(tmp_path, capsys):
    out = str(tmp_path / "pants")
    assert main(["run", PANTS, "--out-dir", out]) == 0
    assert "certified" in capsys.readouterr().out
    for name in FILES:
        assert os.path.getsize(os.path.join(out, name)) > 0
    data = _report(out)
    assert data["scenario"] == "pants" and data["exit_status"] == 0
    assert data["hull"]["verdict"] == "certified" and len(data["hull"]["vertices"]) == 3
    assert data["provenance"]["config_hash"].startswith("sha256:")
    for key in ("hull", "checks", "provenance"):
        assert data[key]["precision_bits"] == 256
    with open(os.path.join(out, "curves.csv"), newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == CSV_COLUMNS and len(rows) == 4


def test_verify_pants(tmp_path, capsys):
    out = str(tmp_path / "pants")
    main(["run", PANTS, "--out-dir", out])
    capsys.readouterr()
    assert main(["verify", out]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["outside"] == 0 and summary["rows"] == 3


@pytest.mark.parametrize("config,extra", [(PANTS, []), (HEXAGON, ["--word-max-len", "4"])])
def test_outputs_are_deterministic(tmp_path, config, extra):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["run", config, "--out-dir", a, *extra]) == 0
    assert main(["run", config, "--out-dir", b, *extra]) == 0
    for name in FILES:
        assert _read(os.path.join(a, name)) == _read(os.path.join(b, name)), name


def test_render(tmp_path):
    out = str(tmp_path / "pants")
    main(["run", PANTS, "--out-dir", out])
    svg = str(tmp_path / "again.svg")
    assert main(["render", out, "-o", svg]) == 0
    text = _read(svg)
    assert text == _read(os.path.join(out, "cone.svg"))
    assert text.startswith(b"<?xml") and b"[1:0:0]" in text and b"certified" in text


def test_render_empty_hull(tmp_path):
    out = str(tmp_path / "pants")
    main(["run", PANTS, "--out-dir", out])
    data = _report(out)
    data["hull"]["vertices"], data["hull"]["facets"] = [], []
    with open(os.path.join(out, "report.json"), "w") as fh:
        json.dump(data, fh)
    code = main(["render", out, "-o", str(tmp_path / "x.svg")])
    assert code == errors.DegenerateHull("").exit_code != 0
    assert not os.path.exists(tmp_path / "x.svg")


def test_config_errors(tmp_path):
    assert main(["run", str(tmp_path / "missing.yaml")]) == 4
    assert main(["run", _write(tmp_path, "bad.yaml", "scenario: [unclosed\n")]) == 4
    assert main(["run", _write(tmp_path, "x.yaml", "scenario: torus\n")]) == 4
    assert main(["run", _write(tmp_path, "k.yaml", "scenario: pants\ncolour: red\n")]) == 4
    assert main(["run", PANTS, "--precision-bits", "128", "--out-dir", str(tmp_path / "p")]) == 4
    fish = "scenario: fish\nparams: {a: 6, b: -8}\n"
    assert main(["run", _write(tmp_path, "f.yaml", fish)]) == 4
    assert main(["run", _write(tmp_path, "q.yaml", "scenario: fish\nparams: {a: 6, b: 8}\n"),
                 "--q-max", "0"]) == 4


def test_io_errors(tmp_path):
    assert main(["verify", str(tmp_path / "nowhere")]) == 6
    out = str(tmp_path / "pants")
    main(["run", PANTS, "--out-dir", out])
    os.remove(os.path.join(out, "curves.csv"))
    assert main(["verify", out]) == 6


def test_precision_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("LIMITCONE_PRECISION_BITS", "320")
    out = str(tmp_path / "env")
    assert main(["run", PANTS, "--out-dir", out]) == 0
    assert _report(out)["provenance"]["precision_bits"] == 320
    flag = str(tmp_path / "flag")
    assert main(["run", PANTS, "--out-dir", flag, "--precision-bits", "384"]) == 0
    assert _report(flag)["provenance"]["precision_bits"] == 384
    monkeypatch.setenv("LIMITCONE_PRECISION_BITS", "100")
    assert main(["run", PANTS, "--out-dir", out]) == 4


def test_exit_codes_are_distinct():
    classes = [errors.ConfigError, errors.PrecisionError, errors.GeometryError,
               errors.TraceError, errors.PolygonError, errors.ConeError, errors.WordError]
    codes = [cls("").exit_code for cls in classes]
    assert len(set(codes)) == len(codes)
    assert not {0, 2, 3, 6} & set(codes)
