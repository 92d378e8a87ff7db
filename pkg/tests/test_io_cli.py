"""Command line contract: outputs, schemas, exit codes and file handling."""

import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from gacurves.cli import main, normalize_argv, parse_grid
from gacurves.curves import read_samples_csv
from gacurves.errors import UsageError
from gacurves.io import OUTPUT_DIR_ENV, dumps, emit_svg, load_schema, resolve_output, validate
from gacurves.reconstruct import plane_profile, reconstruct

jsonschema = pytest.importorskip("jsonschema")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


# ----------------------------------------------------------------------
# argument helpers
def test_normalize_argv_joins_negative_values():
    assert normalize_argv(["classify", "--k", "-4", "--eps", "1"]) == ["classify", "--k=-4", "--eps", "1"]
    assert normalize_argv(["--k", "-sqrt(2)", "--plane"]) == ["--k=-sqrt(2)", "--plane"]
    assert normalize_argv(["--k", "--eps"]) == ["--k", "--eps"]


def test_parse_grid():
    assert parse_grid("0:6.28:200") == (0.0, 6.28, 200)
    assert parse_grid("-1:pi:3")[1] == pytest.approx(math.pi)
    for bad in ("1:0:5", "0:1:1", "0:1", "a:b:c"):
        with pytest.raises(UsageError):
            parse_grid(bad)


# ----------------------------------------------------------------------
# documented examples
def test_invariants_log_spiral(capsys):
    d = run_json(capsys, "invariants", "--builtin", "log-spiral", "--param", "gamma=1", "--param", "alpha=1",
                 "--grid", "0:6.28:200", "--format", "json")
    validate(d, "invariants")
    assert len(d["records"]) == 200
    assert all(abs(r["k"] + 1.264911064) < 1e-6 for r in d["records"])
    assert d["tolerances"]["tol_singular"] > 0


def test_invariants_viviani(capsys):
    d = run_json(capsys, "invariants", "--dim", "3", "--expr", "(1+cos(2*t), sin(2*t), 2*sin(t))",
                 "--grid", "-1.4:1.4:281", "--format", "json")
    validate(d, "invariants")
    ts = sorted(e["t"] for e in d["events"] if e["kind"] == "inflection")
    assert len(ts) == 2
    for t in ts:
        assert math.cos(t) ** 2 == pytest.approx(7 / 31, abs=1e-10)


def test_reconstruct_conic(capsys, tmp_path):
    rep = tmp_path / "r.json"
    code, out, err = run(capsys, "reconstruct", "--plane", "--k", "0", "--eps", "1",
                         "--grid", f"0:{2 * math.pi!r}:101", "--report", str(rep))
    assert code == 0
    d = json.loads(rep.read_text())
    validate(d, "reconstruction")
    assert d["roundtrip"]["k_error"] < 1e-9
    xy = np.loadtxt(out.splitlines()[1:], delimiter=",")[:, 1:]
    assert np.linalg.norm(xy[-1] - xy[0]) < 1e-8  # closed


def test_reconstruct_mk_linear_complex(capsys, tmp_path):
    rep = tmp_path / "s.json"
    code, _, _ = run(capsys, "reconstruct", "--space", "--k", "-sqrt(2)", "--M", "sqrt(2)", "--eps", "-1",
                     "--report", str(rep))
    assert code == 0
    d = json.loads(rep.read_text())
    validate(d, "reconstruction")
    assert d["linear_complex"] and d["theta3_sup"] < 1e-12


def test_reconstruct_extremal_profile(capsys, tmp_path):
    rep = tmp_path / "p.json"
    code, _, _ = run(capsys, "reconstruct", "--plane", "--k", "sqrt(2)+3/t", "--eps", "-1",
                     "--grid", "0.5:3:300", "--report", str(rep))
    assert code == 0
    d = json.loads(rep.read_text())
    assert d["extremal"]["verdict"] is True


def test_extremal_example(capsys):
    d = run_json(capsys, "extremal", "--equation", "ga-plane", "--k", "3*sqrt(2)*tanh(sqrt(2)*t)", "--eps", "1")
    validate(d, "residual")
    assert d["verdict"] is True


@pytest.mark.parametrize("argv", [
    ("extremal", "--equation", "ga-space", "--k", "0", "--M", "0", "--eps", "1"),
    ("extremal", "--equation", "linear-complex", "--k", "1", "--eps", "-1"),
    ("extremal", "--equation", "ga-plane-general", "--k", "2", "--f", "k^2/2", "--eps", "1"),
    ("extremal", "--equation", "proj-plane", "--k", "0.3"),
    ("extremal", "--equation", "proj-space", "--k1", "0.3", "--k2", "-1"),
    ("extremal", "--equation", "equiaffine-space", "--builtin", "cubic-parabola"),
])
def test_extremal_equations_validate(capsys, argv):
    d = run_json(capsys, *argv)
    validate(d, "residual")
    assert d["verdict"] is True


def test_classify_examples(capsys):
    d = run_json(capsys, "classify", "--plane", "--k", "-4", "--eps", "1")
    validate(d, "classification")
    assert d["family"] == "tlogt"
    d = run_json(capsys, "classify", "--projective", "--a", "6", "--b", "-8", "--c", "3")
    validate(d, "classification")
    assert d["family"] == "CV8" and d["parameters"]["lam"] == pytest.approx(1.0, rel=1e-12)
    d = run_json(capsys, "classify", "--space", "--k", "-sqrt(2)", "--M", "sqrt(2)", "--eps", "-1")
    validate(d, "classification")
    assert d["family"] == "mk"


def test_classify_catalog(capsys):
    d = run_json(capsys, "classify", "--catalog")
    validate(d, "catalog")


def test_abel_json(capsys):
    d = run_json(capsys, "abel", "--k", "-4.5", "--eps", "1", "--x1", "1.5", "--n", "11")
    validate(d, "abel")
    assert d["roundtrip"]["k_error"] < 1e-8


# ----------------------------------------------------------------------
# exit codes
def test_exit_usage_missing_source(capsys):
    code, out, err = run(capsys, "invariants")
    assert code == 1 and "usage:" in err and out == ""


@pytest.mark.parametrize("argv", [
    ("invariants", "--x", "t", "--y", "t +* 2"),
    ("invariants", "--x", "t", "--y", "foo(t)"),
    ("invariants", "--builtin", "no-such-curve"),
    ("classify", "--plane", "--k", "-4", "--eps", "0"),
    ("extremal", "--equation", "ga-plane"),
    ("nonsense",),
])
def test_exit_usage(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err


def test_syntax_error_reports_position(capsys):
    code, _, err = run(capsys, "invariants", "--x", "t", "--y", "t +* 2")
    assert "offset 3" in err


@pytest.mark.parametrize("argv", [
    ("invariants", "--x", "t", "--y", "2*t"),
    ("reconstruct", "--plane", "--k", "log(t)", "--eps", "1", "--grid", "-2:-1:11"),
    ("abel", "--k", "1", "--eps", "1"),  # no closed-form start value: k^2 < 16 eps
])
def test_exit_domain_with_error_report(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 2
    d = json.loads(out)
    validate(d, "error")


def test_exit_integration(capsys):
    code, out, _ = run(capsys, "abel", "--k", "0", "--eps", "1", "--s0", "1", "--x1", "30")
    assert code == 3
    d = json.loads(out)
    validate(d, "error")
    assert d["x"] == pytest.approx(1.5, abs=1e-3)


# ----------------------------------------------------------------------
# files
def test_reconstruct_csv_reingests_bit_for_bit(capsys, tmp_path):
    path = tmp_path / "curve.csv"
    code, _, _ = run(capsys, "reconstruct", "--plane", "--k", "-4 + t", "--eps", "1", "--grid", "0:1:51",
                     "--output", str(path))
    assert code == 0
    spec = read_samples_csv(path)
    direct = reconstruct(plane_profile("-4 + t", 1, (0.0, 1.0)), 51, roundtrip=False)
    assert np.array_equal(spec.samples_t, direct.t)
    assert np.array_equal(spec.samples_x, direct.x)
    # feeding the file back through the CLI works
    code, out, _ = run(capsys, "invariants", "--samples", str(path), "--format", "csv")
    assert code == 0 and out.startswith("t,")


def test_output_dir_override(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    code, out, _ = run(capsys, "classify", "--plane", "--k", "0", "--eps", "1", "--output", "sub/c.json")
    assert code == 0 and out == ""
    assert json.loads((tmp_path / "sub" / "c.json").read_text())["family"] == "ellipse-graph"
    assert resolve_output("/abs/x.json").as_posix() == "/abs/x.json"


def test_svg_output_is_valid(capsys):
    code, out, _ = run(capsys, "invariants", "--builtin", "rose", "--format", "svg")
    assert code == 0
    root = ET.fromstring(out.split("?>", 1)[1])
    assert root.tag.endswith("svg") and root.get("version") == "1.1"
    code, out, _ = run(capsys, "invariants", "--builtin", "viviani", "--format", "svg", "--view", "45,30")
    assert code == 0
    ET.fromstring(out.split("?>", 1)[1])


def test_svg_marks_events():
    pts = np.c_[np.linspace(0, 1, 20), np.linspace(0, 1, 20) ** 2]
    svg = emit_svg(pts, [(0.5, 0.25, "vertex")])
    root = ET.fromstring(svg.split("?>", 1)[1])
    assert any(el.tag.endswith("circle") for el in root.iter())


def test_svg_empty_input():
    with pytest.raises(UsageError):
        emit_svg(np.empty((0, 2)))


def test_dumps_roundtrips_floats():
    vals = [0.1, 1 / 3, math.pi * 1e-300, -2.5e17]
    assert json.loads(dumps({"v": np.array(vals)}))["v"] == vals


def test_schemas_load():
    for name in ("invariants", "reconstruction", "residual", "classification", "catalog", "abel", "error"):
        assert load_schema(name)["type"] == "object"
