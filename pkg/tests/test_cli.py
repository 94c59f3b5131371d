import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from abspec import cli
from abspec.secular import CountMismatchError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_csv(capsys):
    code, out, _ = run(capsys, "spectrum", "--xi", "0", "--eta", "0", "--zeta", "0", "--lambda-max", "8")
    assert code == 0
    lines = out.split("\n")
    assert lines[0] == "lambda,z,source,sectors,multiplicity"
    assert [float(l.split(",")[0]) for l in lines[1:] if l] == pytest.approx([1, 1.6, 3, 3.6, 5, 5.6, 7, 7.6])
    assert "\r" not in out
    # default m_cap = 10: sector -1 plus ten stable sectors
    assert lines[1].endswith(",11")


def test_spectrum_is_byte_stable(capsys):
    argv = ("spectrum", "--xi", "0.7", "--eta", "-0.4", "--zeta", "0.3", "--lambda-max", "12")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_spectrum_hinf(capsys):
    code, out, _ = run(capsys, "spectrum", "--bc", "inf", "--lambda-max", "4")
    assert code == 0
    assert float(out.split("\n")[1].split(",")[0]) == pytest.approx(-0.4)


def test_spectrum_json(capsys):
    code, out, _ = run(capsys, "spectrum", "--u", "0.5", "--w", "0.1+0.2j", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"config", "records", "diagnostics"}
    assert doc["config"]["bc"] == {"kind": "uvw", "u": 0.5, "v": 0.0, "w": [0.1, 0.2]}
    rec = doc["records"][0]
    assert set(rec) == {"lambda", "z", "source", "sources", "sectors", "multiplicity", "truncated"}
    assert doc["diagnostics"][0]["level"] == "warning"


def test_spectrum_svg_and_output_file(capsys, tmp_path):
    path = tmp_path / "s.svg"
    code, out, _ = run(capsys, "spectrum", "--xi", "1", "--format", "svg", "-o", str(path))
    assert code == 0 and out == ""
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--xi", "1", "--u", "2"],
        ["spectrum"],
        ["spectrum", "--zeta", "-1"],
        ["spectrum", "--xi", "1", "--lambda-max", "0.5"],
        ["spectrum", "--xi", "1", "--alpha", "1.2"],
        ["sweep", "--dir", "1,0"],
        ["sweep", "--dir", "1,0,0", "--t", "0:1:1"],
        ["sweep", "--dir", "1,0,0", "--lambda-window", "3:1"],
        ["green", "--m", "0", "--z", "1.6", "--r1", "0.5", "--r2", "1"],
        ["spectrum", "--no-such-flag"],
    ],
)
def test_config_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "config"


def test_count_mismatch_exit(capsys, monkeypatch):
    def boom(*_):
        raise CountMismatchError("short", None, 0)

    monkeypatch.setattr(cli, "full_spectrum", boom)
    code, _, err = run(capsys, "spectrum", "--xi", "1")
    assert code == 2
    assert json.loads(err)["error"] == "count_mismatch"


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "tables")
    assert code == 0
    assert out.startswith("suite,check,status,measured,tolerance,detail\n")
    assert ",FAIL," not in out


def test_verify_failure_exit(capsys):
    # the truncated Laguerre sum misses the relative 1e-8 target
    code, out, _ = run(capsys, "verify", "green", "--format", "json")
    assert code == 3
    assert not all(r["passed"] for r in json.loads(out)["records"])


def test_sweep_dashed_values(capsys):
    code, out, _ = run(capsys, "sweep", "--dir", "1,0,0", "--t", "-5:5:3", "--lambda-window", "-2:4")
    assert code == 0
    lines = [l for l in out.split("\n") if l]
    assert lines[0] == "t,branch_id,lambda"
    ts = sorted({float(l.split(",")[0]) for l in lines[1:]})
    assert ts == [-5.0, 0.0, 5.0]


def test_sweep_two_steps_json(capsys):
    code, out, _ = run(capsys, "sweep", "--dir", "0.95,0.25,0.25", "--t", "0:1:2", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert {r["t"] for r in doc["records"]} == {0.0, 1.0}
    assert doc["config"]["lambda_window"] == [-6.0, 12.0]


def test_sweep_svg(capsys):
    code, out, _ = run(capsys, "sweep", "--dir", "1,0,0", "--t", "-1:1:5", "--format", "svg")
    assert code == 0
    ET.fromstring(out)


def test_green(capsys):
    code, out, _ = run(capsys, "green", "--m", "0", "--z", "0.5", "--r1", "0.6", "--r2", "1.4", "--format", "json")
    assert code == 0
    rec = json.loads(out)["records"][0]
    assert rec["relative_difference"] < 1e-3


def test_help_documents_schema(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["spectrum", "--help"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    assert '"diagnostics"' in out and "exit codes" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "abspec.cli", "spectrum", "--bc", "inf", "--lambda-max", "2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "lambda,z,source,sectors,multiplicity"
