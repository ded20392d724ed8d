import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from entroscope import cli, cft1d
from entroscope.scaling import DivergenceFit, EntropySeries


def run(args, capsys):
    code = cli.run(args)
    out, err = capsys.readouterr()
    return code, out, err


def rows(csv_text):
    return [line.split(",") for line in csv_text.splitlines()[1:] if not line.startswith("#")]


def test_cft1d_single_row(capsys):
    code, out, _ = run(["cft1d", "--mi", "--L", "1", "--x", "1"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "param,value"
    (row,) = rows(out)
    assert float(row[1]) == pytest.approx(9.5894024150593644e-2, rel=1e-15)
    assert row[1].startswith("9.58940241505936") and row[1].endswith("e-02")
    assert "# meta: unit=nats" in out


def test_lattice_vs_cft_command(capsys):
    _, lat, _ = run(["lattice", "--mi", "--L", "64", "--x", "16"], capsys)
    _, con, _ = run(["cft1d", "--mi", "--L", "64", "--x", "16"], capsys)
    assert abs(float(rows(lat)[0][1]) - float(rows(con)[0][1])) <= 0.02


def test_scan_holo_then_fit_json(capsys):
    code, out, _ = run(["scan", "--engine", "holo", "--param", "x", "--from", "1e-3", "--to", "0.3",
                        "--points", "40", "--log-grid", "--then-fit", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["param_name"] == "x" and len(doc["points"]) == 40
    assert doc["fit"]["kind"] == "power"
    assert doc["fit"]["exponent"] == pytest.approx(1.0, rel=0.02)
    assert doc["meta"]["engine"] == "holo" and doc["meta"]["w"] == "1.0000000000000000e+00"
    assert "prefactor" in doc["meta"]["convention"]


def test_json_without_fit_is_null(capsys):
    _, out, _ = run(["holo", "--mi", "--format", "json"], capsys)
    assert json.loads(out)["fit"] is None


def test_identical_config_identical_bytes(capsys, monkeypatch):
    args = ["scan", "--engine", "lattice", "--param", "x", "--from", "1", "--to", "16", "--points", "6",
            "--L", "32", "--then-fit"]
    monkeypatch.setenv("ENTROSCOPE_THREADS", "1")
    _, a, _ = run(args, capsys)
    monkeypatch.setenv("ENTROSCOPE_THREADS", "4")
    _, b, _ = run(args, capsys)
    _, c, _ = run(args, capsys)
    assert a == b == c


def test_csv_roundtrip():
    series = EntropySeries(((1e-3, 1 / 3), (2e-3, -math.pi), (0.5, 1e300)), "x", {"engine": "demo"})
    fit = DivergenceFit("power", 1.0000000000000002, 2.5, -0.1, 1e-17, (1e-3, 0.5))
    back, fit_back = cli.parse_csv(cli.render_csv(series, fit))
    assert back == series
    assert fit_back == fit
    back, none = cli.parse_csv(cli.render_csv(series))
    assert back == series and none is None


def test_json_roundtrip():
    series = EntropySeries(((1e-3, 1 / 3), (2e-3, -math.pi)), "L", {"a": "b"})
    fit = DivergenceFit("log", math.nan, 2.0, 1.0, 0.0, (1e-3, 2e-3))
    back, fit_back = cli.parse_json(cli.render_json(series, fit))
    assert back == series
    assert fit_back.kind == "log" and math.isnan(fit_back.exponent) and fit_back.coefficient == 2.0


def test_fit_command_reads_scan_output(tmp_path, capsys):
    path = tmp_path / "series.csv"
    code, _, _ = run(["scan", "--engine", "cft1d", "--param", "x", "--from", "1e-6", "--to", "1e-4",
                      "--points", "12", "--log-grid", "--output", str(path)], capsys)
    assert code == 0
    code, out, _ = run(["fit", "--input", str(path), "--format", "json"], capsys)
    assert code == 0
    fit = json.loads(out)["fit"]
    assert fit["kind"] == "log"
    assert fit["coefficient"] == pytest.approx(cft1d.singularity_coefficient(1.0), rel=1e-3)


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# two intervals\nL = 2\nx = 1\nformat = json\n")
    _, out, _ = run(["cft1d", "--config", str(cfg)], capsys)
    doc = json.loads(out)
    assert doc["points"][0][1] == pytest.approx(math.log(9 / 5) / 3, rel=1e-15)
    _, out, _ = run(["cft1d", "--config", str(cfg), "--x", "2", "--format", "csv"], capsys)
    assert float(rows(out)[0][1]) == pytest.approx(cft1d.mutual_information_equal_intervals(2, 2), rel=1e-15)


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("L = 2\ncolour = blue\n")
    code, out, err = run(["cft1d", "--config", str(cfg)], capsys)
    assert code == 2 and out == "" and "colour" in err


def test_parameter_not_used_by_quantity(capsys):
    code, _, err = run(["cft1d", "--mi", "--epsilon", "0.1"], capsys)
    assert code == 2 and "epsilon" in err


@pytest.mark.parametrize("args,name", [
    (["lattice", "--mi", "--L", "0"], "L"),
    (["lattice", "--mi", "--x", "2.5"], "x"),
    (["cft1d", "--mi", "--x", "-1"], "x"),
    (["holo", "--mi", "--epsilon", "0.5"], "epsilon"),
    (["holo", "--mi", "--w", "abc"], "w"),
    (["twist", "--quantity", "circle", "--epsilon", "0.2"], "epsilon"),
    (["twist", "--quantity", "circle", "--panels", "100"], "panel"),
    (["twist", "--quantity", "wedge", "--theta", "4"], "theta"),
    (["scan", "--engine", "holo", "--from", "1", "--to", "0.1", "--points", "5"], "from"),
    (["scan", "--engine", "holo", "--param", "q", "--from", "1", "--to", "2", "--points", "5"], "param"),
    (["scan", "--engine", "holo", "--to", "2", "--points", "5"], "from"),
    (["cft1d", "--quantity", "nope"], "quantity"),
])
def test_domain_errors_exit_2_and_name_parameter(args, name, capsys):
    code, out, err = run(args, capsys)
    assert code == 2
    assert out == ""
    assert name in err


def test_unwritable_output_exit_2(tmp_path, capsys):
    code, _, err = run(["cft1d", "--mi", "--output", str(tmp_path / "missing" / "x.csv")], capsys)
    assert code == 2 and "output" in err


def test_numerical_failure_exit_3(monkeypatch, capsys):
    from entroscope.errors import NumericalFailureError

    def boom(*_):
        raise NumericalFailureError("eigenvalues out of range")

    monkeypatch.setattr(cli.lattice, "lattice_mutual_information", boom)
    code, _, err = run(["lattice", "--mi"], capsys)
    assert code == 3 and "numerical" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        cli.run(["holo", "--bogus", "1"])
    assert info.value.code == 2


def test_scan_integer_parameter_rounding(capsys):
    code, out, _ = run(["scan", "--engine", "lattice", "--param", "x", "--from", "2", "--to", "16",
                        "--points", "4", "--log-grid", "--L", "16"], capsys)
    assert code == 0
    assert [float(r[0]) for r in rows(out)] == [2.0, 4.0, 8.0, 16.0]
    code, _, err = run(["scan", "--engine", "lattice", "--param", "x", "--from", "1", "--to", "3",
                        "--points", "10", "--L", "8"], capsys)
    assert code == 2 and "x" in err


@pytest.mark.parametrize("args", [
    ["cft1d", "--entropy", "--L", "100", "--epsilon", "1"],
    ["cft1d", "--quantity", "two-interval"],
    ["cft1d", "--quantity", "singularity", "--c", "2"],
    ["lattice", "--entropy", "--L", "8"],
    ["holo", "--entropy"],
    ["holo", "--quantity", "turning-point"],
    ["holo", "--quantity", "parabolic", "--x0", "1e-3", "--y-min", "-0.01", "--y-max", "0.01"],
    ["holo", "--quantity", "corner", "--w0", "inf"],
    ["twist", "--quantity", "sphere", "--epsilon", "0.01"],
    ["twist", "--quantity", "segments", "--panels", "400"],
    ["twist", "--quantity", "circle", "--panels", "2600", "--epsilon", "0.01"],
])
def test_every_quantity_runs(args, capsys):
    code, out, _ = run(args, capsys)
    assert code == 0
    assert np.isfinite(float(rows(out)[0][1]))


def test_two_interval_metadata_flags_functional_form(capsys):
    _, out, _ = run(["cft1d", "--quantity", "two-interval", "--c", "2"], capsys)
    assert "# meta: convention=free-fermion functional form" in out


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "entroscope.cli", "cft1d", "--mi"],
                         capture_output=True, text=True, env=dict(os.environ))
    assert out.returncode == 0 and out.stdout.startswith("param,value")
