import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from expander_net.cli import main
from expander_net.network import NetworkConfig, solve_triple_point

SVG = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_mercedes_json(capsys):
    code, out, _ = run(capsys, "solve", "0", "120", "240")
    assert code == 0
    data = json.loads(out)
    assert data["triple_point"] == [0.0, 0.0]
    assert data["balance_residual"] <= 1e-9
    assert len(data["curves"]) == 3
    assert data["certificate"]["radius"] == 16.0


def test_json_round_trip_is_bit_exact(capsys, tmp_path):
    path = tmp_path / "net.json"
    code, _, _ = run(capsys, "solve", "45", "180", "-45", "-o", str(path))
    assert code == 0
    data = json.loads(path.read_text())
    net, _ = solve_triple_point(NetworkConfig.from_angles((45, 180, -45), degrees=True))
    for c, d in zip(net.curves, data["curves"]):
        assert np.array_equal(np.array(d["vertices"]), c.vertices)
    p = data["triple_point"]
    assert p[0] > 0 and abs(p[1]) < 1e-8


def test_invalid_config_exit_code(capsys):
    code, out, err = run(capsys, "solve", "0", "0", "90")
    assert code == 2 and out == ""
    assert json.loads(err)["message"] == "half-lines must be pairwise distinct"


def test_radians_flag_and_time(capsys):
    code, out, _ = run(capsys, "solve", "0", str(2 * math.pi / 3), str(4 * math.pi / 3),
                       "--radians", "--time", "2.0")
    assert code == 0
    data = json.loads(out)
    assert data["time"] == 2.0
    v = np.array(data["curves"][0]["vertices"])
    assert np.hypot(*v[-1]) > 20.0  # scaled by sqrt(2 t) = 2


def test_csv_output(capsys):
    code, out, _ = run(capsys, "solve", "0", "120", "240", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "curve,index,x,y"
    assert {row.split(",")[0] for row in lines[1:]} == {"0", "1", "2"}


def test_svg_output(capsys):
    code, out, _ = run(capsys, "solve", "0", "100", "200", "--format", "svg")
    assert code == 0
    root = ET.fromstring(out)
    assert len(root.findall(f"{SVG}path")) == 3
    x0, y0, w, h = map(float, root.attrib["viewBox"].split())
    for path in root.findall(f"{SVG}path"):
        nums = np.array(path.attrib["d"].replace("M", "").replace("L", "").split(), dtype=float)
        xs, ys = nums[0::2], nums[1::2]
        assert xs.min() >= x0 and xs.max() <= x0 + w
        assert ys.min() >= y0 and ys.max() <= y0 + h


def test_curve_command(capsys):
    code, out, _ = run(capsys, "curve", "0", "--point", "0", "1")
    assert code == 0
    data = json.loads(out)
    assert data["vertices"][0] == pytest.approx([0.0, 1.0], abs=1e-9)
    assert data["tangent_at_point"] == pytest.approx([0.4703473, -0.8824814], abs=1e-7)


def test_field_command(capsys):
    code, out, _ = run(capsys, "field", "0", "120", "240", "--bounds", "-1", "1", "-1", "1",
                       "--resolution", "3")
    assert code == 0
    rows = [r.split(",") for r in out.strip().splitlines()[1:]]
    assert len(rows) == 9
    origin = [r for r in rows if float(r[0]) == 0 and float(r[1]) == 0][0]
    assert abs(float(origin[2])) < 1e-12 and abs(float(origin[3])) < 1e-12


def test_field_empty_grid(capsys):
    code, _, err = run(capsys, "field", "0", "120", "240", "--resolution", "0")
    assert code == 2 and "resolution" in json.loads(err)["message"]


def test_verify_only(capsys):
    code, out, _ = run(capsys, "verify", "--only", "angle-area")
    assert code == 0
    assert out.startswith("PASS  angle-area")


def test_verify_tightened_names_tags(capsys):
    code, out, _ = run(capsys, "verify", "--only", "angle-area", "round-trip", "--tighten", "1e9")
    assert code == 1
    assert "angle monotonicity" in out and "homeomorphism h->a" in out


def test_unknown_command_exit_code(capsys):
    assert main(["nope"]) == 2
