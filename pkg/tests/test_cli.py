import json
import math
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from kepler_monodromy.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_singular(capsys):
    code, out, _ = run(capsys, "classify", "--c3", "1", "0", "--c4", "-0.5", "0")
    assert code == 0
    assert out.strip() == "SingularCone, 1+2c4c3² = 0"


def test_classify_json(capsys):
    code, out, _ = run(capsys, "classify", "--c3", "1", "0", "--c4", "1", "0", "--json")
    assert code == 0
    first, rest = out.split("\n", 1)
    assert first.startswith("SmoothCylinder")
    assert json.loads(rest)["discriminant"] == [3.0, 0.0]


def test_periods_record(capsys, tmp_path):
    path = tmp_path / "p.json"
    code, out, _ = run(capsys, "periods", "--c3", "1", "0", "--c4", "1", "0", "--out", str(path))
    assert code == 0
    rec = json.loads(out)
    assert rec["nu"][1] == pytest.approx(-2.221441469, abs=1e-9)
    assert rec["mu"] == pytest.approx([-2 * math.pi, 0], abs=1e-9)
    assert rec["residue_periods"]["alpha_gamma2"] == pytest.approx([-4 * math.pi, 0], abs=1e-9)
    assert json.loads(path.read_text()) == rec


def test_periods_zero_angular_momentum(capsys):
    code, out, err = run(capsys, "periods", "--c3", "0", "0", "--c4", "1", "0")
    assert code == 0
    rec = json.loads(out)
    assert rec["residue_periods"]["alpha_gamma2"] == pytest.approx([-2 * math.pi, 0], abs=1e-9)
    assert rec["residue_periods"]["alpha_gamma3"] is None
    assert "gamma3" in err


def test_periods_on_singular_fiber_fails(capsys):
    code, _, err = run(capsys, "periods", "--c3", "1", "0", "--c4", "-0.5", "0")
    assert code == 1
    assert err.startswith("error:")


def test_monodromy_c4axis(capsys, tmp_path):
    trace = tmp_path / "t.jsonl"
    code, out, _ = run(capsys, "monodromy", "--loop", "c4axis", "--trace", str(trace))
    assert code == 0
    rec = json.loads(out)
    assert rec["rows"] == [[-1, -2], [0, 1]]
    assert rec["det"] == -1
    lines = trace.read_text().splitlines()
    assert len(lines) == rec["samples_used"] + 1


def test_monodromy_default_trace_path(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, _ = run(capsys, "monodromy", "--loop", "c4axis", "--samples", "64")
    assert code == 0
    assert (tmp_path / "monodromy_trace_c4axis.jsonl").exists()


@pytest.mark.parametrize("argv", [
    ["monodromy", "--r1", "0.7"],
    ["monodromy", "--samples", "10"],
    ["periods", "--tol", "0"],
    ["monodromy", "--loop", "nowhere"],
    ["classify", "--c3", "1"],
])
def test_invalid_configuration_exits_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_polelocus_files(capsys, tmp_path):
    csv, svg = tmp_path / "l.csv", tmp_path / "l.svg"
    code, out, _ = run(capsys, "polelocus", "--loop", "discriminant", "--csv", str(csv), "--svg", str(svg))
    assert code == 0
    rec = json.loads(out)
    assert rec["angular_span"] == pytest.approx(math.pi, abs=1e-3)
    assert rec["radius_about_half"][1] == pytest.approx(1 / math.sqrt(2), abs=1e-6)
    assert csv.read_text().splitlines()[0] == "t,u_re,u_im"
    root = ET.fromstring(svg.read_bytes())
    assert root.tag.endswith("svg")
    assert any(el.tag.endswith("polyline") for el in root)


def test_polelocus_outputs_are_deterministic(capsys, tmp_path):
    outs = []
    for k in range(2):
        csv, svg = tmp_path / f"{k}.csv", tmp_path / f"{k}.svg"
        run(capsys, "polelocus", "--loop", "c4axis", "--csv", str(csv), "--svg", str(svg))
        outs.append((csv.read_bytes(), svg.read_bytes()))
    assert outs[0] == outs[1]


def test_monodromy_trace_is_deterministic(capsys, tmp_path):
    blobs = []
    for k in range(2):
        path = tmp_path / f"{k}.jsonl"
        run(capsys, "monodromy", "--loop", "c4axis", "--samples", "64", "--trace", str(path))
        blobs.append(path.read_bytes())
    assert blobs[0] == blobs[1]


def test_flow_lattice(capsys, tmp_path):
    csv = tmp_path / "f.csv"
    code, out, _ = run(capsys, "flow", "--lattice", "--time", "1", "0", "--csv", str(csv))
    assert code == 0
    rec = json.loads(out)
    ret = rec["lattice_return"]
    assert ret["g1"]["distance"] < 1e-6 and ret["g2"]["distance"] < 1e-6
    assert ret["g1/2"]["distance"] > 1e-2
    assert rec["flow"]["drift_H"] < 1e-9
    assert csv.read_text().startswith("t_re,t_im")


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--only", "1", "2")
    assert code == 0
    assert out.splitlines()[0].startswith("[PASS] 1.")
    assert out.splitlines()[-1] == "2/2 checks passed"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "kepler_monodromy", "classify", "--c3", "0", "0",
                          "--c4", "0", "0"], capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.startswith("ParabolicPlane")
