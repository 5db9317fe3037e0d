import csv
import json
import math
import re

import numpy as np
import pytest

from plaquette import find_k_for_ratio
from plaquette.cli import ConfigError, main, parse_grid, parse_real, parse_seedstate


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_parse_real():
    assert parse_real("0.5pi") == 0.5 * math.pi
    assert parse_real("3*pi/2") == 1.5 * math.pi
    assert parse_real("-pi") == -math.pi
    assert parse_real(2) == 2.0
    for bad in ["__import__('os')", "pi**2", "1/0", "abc", True]:
        with pytest.raises(ConfigError):
            parse_real(bad)


def test_parse_grid_and_seedstate():
    g = parse_grid("phi", "0:4pi:9")
    assert g.max == 4 * math.pi and g.count == 9
    assert parse_grid("u", {"min": 0, "max": 1, "count": 3}).count == 3
    for bad in ["0:1", "0:1:x", "1:0:5", "0:1:1", {"min": 0, "max": 1}]:
        with pytest.raises(ConfigError):
            parse_grid("u", bad)
    s = parse_seedstate("0.5, 0.5i, -0.5, 0.5")
    np.testing.assert_allclose(s.psi, [0.5, 0.5j, -0.5, 0.5])
    np.testing.assert_allclose(parse_seedstate([[0.6, 0], [0, 0], [0, 0.8], [0, 0]]).psi, [0.6, 0, 0.8j, 0])
    for bad in ["1,0,0", "1,1,0,0", "a,b,c,d", 5]:
        with pytest.raises(ConfigError):
            parse_seedstate(bad)


def test_orbit_writes_csv_svg_and_sidecar(in_tmp, capsys):
    assert main(["orbit", "--k", "1", "--phi", "0.5pi", "--u", "3", "--tmax", "5", "--svg", "--out", "o.csv"]) == 0
    header, rows = read_csv("o.csv")
    assert header == ["t", "n1", "n2", "n3", "n4", "xc", "yc", "norm", "energy"]
    assert len(rows) == 501 and float(rows[-1][0]) == pytest.approx(5.0)
    assert all(len(r) == 9 for r in rows)
    raw = (in_tmp / "o.csv").read_bytes()
    assert b"\r" not in raw
    svg = (in_tmp / "o.svg").read_text()
    assert svg.startswith("<svg") or svg.startswith("<?xml")
    assert "<polyline" in svg and "marker-end" in svg
    side = json.loads((in_tmp / "o.json").read_text())
    assert side["config"]["model"]["u"] == "3"
    assert side["config"]["integrator"]["dt"] == 1e-3
    assert side["summary"]["max_norm_drift"] < 1e-12
    assert "<x_c>" in capsys.readouterr().out


def test_orbit_csv_is_byte_stable(in_tmp):
    for name in ("a.csv", "b.csv"):
        assert main(["orbit", "--k", "0.7", "--phi", "1.1", "--u", "6", "--tmax", "3", "--out", name]) == 0
    assert (in_tmp / "a.csv").read_bytes() == (in_tmp / "b.csv").read_bytes()
    # 17 significant digits
    _, rows = read_csv("a.csv")
    assert any(len(re.sub(r"[-.]|e.*", "", v)) >= 16 for v in rows[5])


def test_orbit_zero_flux_has_no_y_motion():
    assert main(["orbit", "--k", "0.8", "--phi", "0", "--u", "5", "--tmax", "20", "--out", "z.csv"]) == 0
    _, rows = read_csv("z.csv")
    assert max(abs(float(r[6])) for r in rows) <= 1e-12


def test_orbit_closes_at_commensurate_ratio():
    k = find_k_for_ratio(2.0, 0.5 * math.pi)[0]
    assert main(["orbit", "--ratio", "2", "--phi", "0.5pi", "--periods", "1", "--out", "c.csv"]) == 0
    _, rows = read_csv("c.csv")
    final = rows[-1]
    assert math.hypot(float(final[5]) + 1, float(final[6])) <= 1e-6
    side = json.load(open("c.json"))
    assert side["config"]["model"]["k"] == pytest.approx(k, abs=1e-15)


def test_orbit_strong_interaction_stays_left():
    assert main(["orbit", "--k", "1", "--phi", "0.5pi", "--u", "21", "--tmax", "200", "--out", "t.csv"]) == 0
    _, rows = read_csv("t.csv")
    t = np.array([float(r[0]) for r in rows])
    xc = np.array([float(r[5]) for r in rows])
    avg = np.sum(0.5 * (xc[1:] + xc[:-1]) * np.diff(t)) / (t[-1] - t[0])
    assert avg <= -0.8


def test_ratio_map_csv_and_inf():
    assert main(["ratio-map", "--grid-x", "0:2pi:5", "--grid-y", "0.5:1.5:3", "--out", "r.csv"]) == 0
    header, rows = read_csv("r.csv")
    assert header == ["phi", "k_over_j", "alpha", "beta", "ratio"]
    assert len(rows) == 15
    # phi = 0, K = J: beta = 0
    cell = [r for r in rows if float(r[0]) == 0 and float(r[1]) == 1.0][0]
    assert cell[4] == "inf" and float(cell[3]) == 0
    # phi = pi row: ratio 1
    for r in rows:
        if float(r[0]) == math.pi:
            assert float(r[4]) == pytest.approx(1.0, abs=1e-12)
    assert json.load(open("r.json"))["x_axis"]["count"] == 5


def test_ratio_map_commensurate_cell():
    k = find_k_for_ratio(2.0, 0.5 * math.pi)[1]
    assert main(["ratio-map", "--grid-x", "0.5pi:pi:2", "--grid-y", f"{k!r}:3:2", "--out", "r.csv"]) == 0
    _, rows = read_csv("r.csv")
    assert float(rows[0][4]) == pytest.approx(2.0, abs=1e-12)


def test_sweep_small_ku(in_tmp):
    args = ["sweep", "--kind", "KU", "--phi", "0.5pi", "--grid-x", "0.5:1.5:2", "--grid-y", "0:40:3", "--tmax", "40"]
    assert main(args + ["--workers", "1", "--out", "s1.csv"]) == 0
    assert main(args + ["--workers", "3", "--out", "s3.csv"]) == 0
    assert (in_tmp / "s1.csv").read_bytes() == (in_tmp / "s3.csv").read_bytes()
    header, rows = read_csv("s1.csv")
    assert header == ["x", "y", "average_xc", "trapped"]
    assert [r[3] for r in rows if float(r[1]) == 0] == ["0", "0"]
    assert {r[3] for r in rows} == {"0", "1"}
    side = json.load(open("s1.json"))
    assert side["provenance"]["integrator"]["dt"] == 1e-3
    assert side["provenance"]["threshold"] == -0.5
    assert side["failures"] == []
    s3 = json.load(open("s3.json"))
    assert s3["provenance"] == side["provenance"]


def test_sweep_reduced_fig8_grid_has_both_verdicts():
    assert main(["sweep", "--kind", "KU", "--grid-x", "0.1:2:24", "--grid-y", "0:40:50", "--tmax", "50", "--out", "f8.csv"]) == 0
    _, rows = read_csv("f8.csv")
    assert len(rows) == 24 * 50
    assert {r[3] for r in rows} == {"0", "1"}
    assert all(r[3] == "0" for r in rows if float(r[1]) == 0)


def test_config_file_and_flag_override(in_tmp):
    cfg = {"command": "orbit", "model": {"k": 0.5, "phi": "0.5pi", "u": 2}, "integrator": {"tmax": 2}, "output": {"out": "f.csv"}}
    (in_tmp / "c.json").write_text(json.dumps(cfg))
    assert main(["orbit", "--config", "c.json", "--u", "4"]) == 0
    side = json.load(open("f.json"))
    assert side["config"]["model"]["u"] == "4"
    assert side["config"]["model"]["k"] == 0.5
    assert side["config"]["integrator"]["tmax"] == 2
    # the sidecar config reproduces the run
    (in_tmp / "again.json").write_text(json.dumps({"command": "orbit", **side["config"]}))
    assert main(["orbit", "--config", "again.json", "--out", "g.csv"]) == 0
    assert (in_tmp / "f.csv").read_bytes() == (in_tmp / "g.csv").read_bytes()


@pytest.mark.parametrize("body", [
    {"model": {"k": 1, "spin": 2}},
    {"physics": {"k": 1}},
    {"grid": {"x": "0:1:3"}},
    {"model": {"k": -1}},
    {"command": "sweep"},
    [1, 2],
])
def test_bad_config_exits_2(in_tmp, body):
    (in_tmp / "c.json").write_text(json.dumps(body))
    assert main(["orbit", "--config", "c.json", "--tmax", "1"]) == 2


def test_config_errors_exit_2(in_tmp):
    assert main(["orbit", "--config", "missing.json"]) == 2
    (in_tmp / "broken.json").write_text("{")
    assert main(["orbit", "--config", "broken.json"]) == 2
    assert main(["orbit", "--dt", "0"]) == 2
    assert main(["orbit", "--dt", "2", "--tmax", "1"]) == 2
    assert main(["orbit", "--seedstate", "1,1,0,0"]) == 2
    assert main(["orbit", "--ratio", "2", "--phi", "0.5pi", "--root", "5"]) == 2
    assert main(["orbit", "--periods", "1", "--k", "1", "--phi", "0.3"]) == 2
    assert main(["sweep", "--grid-x", "0:1:4"]) == 2
    assert main(["nonsense"]) == 2
    assert main(["orbit", "--bogus"]) == 2


def test_critical_empty_grid_exits_2():
    assert main(["critical", "--grid-y", "0:30:0"]) == 2
    assert main(["critical", "--grid-y", "5:5:10"]) == 2


def test_critical_prints_double_well_reference(capsys):
    assert main(["critical", "--k", "1", "--phi", "0", "--grid-y", "0:40:9", "--out", "cr.csv"]) == 0
    out = capsys.readouterr().out
    assert "double-well approximation" in out and "U/K = 8" in out
    assert "verdict flips: 1" in out
    _, rows = read_csv("cr.csv")
    assert [r[0] for r in rows][:2] == ["0", "5"]
    assert json.load(open("cr.json"))["double_well_u_over_k"] == 8.0


def test_critical_transition_window(capsys):
    assert main(["critical", "--k", "1", "--phi", "0.5pi", "--grid-y", "0:30:61"]) == 0
    out = capsys.readouterr().out
    assert "verdict flips: 1" in out
    lo, hi = map(float, re.search(r"U/J in \(([\d.]+), ([\d.]+)\)", out).groups())
    assert 19 <= lo and hi <= 22


def test_validate_passes(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "all checks passed" in out and "FAIL" not in out
    m = re.search(r"analytic vs numeric.*?\s([\d.]+e[-+]\d+)", out)
    assert float(m.group(1)) <= 1e-8


def test_validate_large_step_exits_3(capsys):
    assert main(["validate", "--dt", "0.1"]) == 3
    assert "ToleranceExceeded" in capsys.readouterr().out


def test_figure_outputs(in_tmp):
    pytest.importorskip("matplotlib")
    assert main(["orbit", "--tmax", "2", "--figure", "--out", "p.csv"]) == 0
    assert (in_tmp / "p.png").read_bytes()[:4] == b"\x89PNG"
    assert "p.png" in json.load(open("p.json"))["files"][-1]
