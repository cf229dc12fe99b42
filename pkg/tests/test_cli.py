import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from nonad_lz.cli import main, parse_config, UsageError


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _csv_rows(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(body))


def _strip_wall_time(text):
    return "\n".join(ln for ln in text.splitlines() if not ln.startswith("# wall_time_s"))


def test_gamma_list():
    cfg = parse_config(["ddp", "--gamma", "0.1,0.3,0.7,0.9"])
    assert cfg.gamma_tilde == (0.1, 0.3, 0.7, 0.9)


def test_eps_range():
    cfg = parse_config(["exact", "--eps", "1:10:10"])
    assert cfg.eps_values == pytest.approx(tuple(np.linspace(1, 10, 10)))
    cfg = parse_config(["exact", "--eps", "1:100:3", "--log-eps"])
    assert cfg.eps_values == pytest.approx((1.0, 10.0, 100.0))


@pytest.mark.parametrize("argv", [[], ["exact", "--eps", "1:10"], ["exact", "--eps", "0:1:3"],
                                  ["exact", "--eps", "1:10:1"], ["exact", "--gamma", "a,b"],
                                  ["exact", "--n", "2"], ["exact", "--tol", "0.5"],
                                  ["exact", "--bogus", "1"], ["figure", "9"], ["figure"],
                                  ["spectrum", "--gamma", "0.1,0.2"]])
def test_usage_errors(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == 2
    assert "usage" in err


def test_malformed_range_names_flag(capsys):
    code, _, err = _run(capsys, "exact", "--eps", "1:x:3")
    assert code == 2 and "--eps" in err


def test_spectrum_columns(capsys):
    code, out, _ = _run(capsys, "spectrum", "--n", "3", "--gamma", "0.5", "--u=-1:1:5")
    assert code == 0
    rows = _csv_rows(out)
    assert list(rows[0]) == ["u", "re_e_plus", "im_e_plus", "re_e_minus", "im_e_minus"]
    assert len(rows) == 5
    assert out.startswith("# program:")


def test_branch_points_columns(capsys):
    code, out, _ = _run(capsys, "branch-points", "--n", "3", "--gamma", "0.5", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["columns"] == ["k", "family", "re_u_c", "im_u_c", "re_z_c", "im_z_c", "contributes"]
    assert sum(r["contributes"] for r in doc["rows"]) == 3


def test_exact_linear_law(capsys):
    code, out, _ = _run(capsys, "exact", "--n", "1", "--gamma", "0", "--eps", "2")
    rows = _csv_rows(out)
    assert code == 0
    assert float(rows[0]["p"]) == pytest.approx(math.exp(-math.pi), rel=1e-6)
    assert "window_converged=true" in rows[0]["diagnostics"]


def test_round_trip_formatting(capsys):
    _, out, _ = _run(capsys, "ddp", "--n", "3", "--gamma", "0.3", "--eps", "5")
    from nonad_lz import p_underdamped
    assert float(_csv_rows(out)[0]["p"]) == p_underdamped(3, 0.3, 5.0).p


def test_csv_json_agree(capsys):
    args = ["ddp", "--n", "3", "--gamma", "0.3,1.1", "--eps", "1:9:5"]
    _, out_csv, _ = _run(capsys, *args)
    _, out_json, _ = _run(capsys, *args, "--format", "json")
    rows_csv = _csv_rows(out_csv)
    rows_json = json.loads(out_json)["rows"]
    assert len(rows_csv) == len(rows_json) == 10
    for a, b in zip(rows_csv, rows_json):
        for key in ("eps", "gamma", "p"):
            assert float(a[key]) == b[key]
        assert a["method"] == b["method"]


def test_deterministic_output(capsys):
    args = ["figure", "4", "--gamma", "0.3", "--eps", "1:3:3"]
    _, a, _ = _run(capsys, *args)
    _, b, _ = _run(capsys, *args)
    assert _strip_wall_time(a) == _strip_wall_time(b)


def test_parallel_equals_serial(capsys):
    args = ["figure", "4", "--gamma", "0.3,0.7", "--eps", "1:4:4"]
    _, serial, _ = _run(capsys, *args)
    _, par, _ = _run(capsys, *args, "--workers", "2")
    assert _csv_rows(serial) == _csv_rows(par)


def test_rows_sorted_by_swept_parameters(capsys):
    _, out, _ = _run(capsys, "ddp", "--gamma", "0.7,0.1", "--eps", "3,1")
    keys = [(float(r["gamma"]), float(r["eps"])) for r in _csv_rows(out)]
    assert [k[0] for k in keys] == sorted(k[0] for k in keys)


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("n = 5\ngamma = 0.2\neps = 1:3:3\nformat = json\n")
    code, out, _ = _run(capsys, "ddp", "--config", str(cfg), "--gamma", "0.4")
    doc = json.loads(out)
    assert code == 0
    assert {r["gamma"] for r in doc["rows"]} == {0.4}
    assert len(doc["rows"]) == 3
    assert doc["metadata"]["config"]["n"] == 5


def test_config_file_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("colour = blue\n")
    code, _, err = _run(capsys, "ddp", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_config_file_figure(tmp_path, capsys):
    cfg = tmp_path / "fig.ini"
    cfg.write_text("figure = 3\ngamma = 0.2\n")
    code, out, _ = _run(capsys, "figure", "--config", str(cfg))
    assert code == 0
    assert "contributes" in out.splitlines()[4]


def test_metadata_echo(capsys):
    _, out, _ = _run(capsys, "oscillator", "--gamma", "0.4", "--eps", "2", "--format", "json")
    meta = json.loads(out)["metadata"]
    assert meta["program"] == "nonad-lz" and "wall_time_s" in meta
    assert meta["config"]["gamma"] == "0.4"


def test_output_file(tmp_path, capsys):
    dest = tmp_path / "p.csv"
    code, out, _ = _run(capsys, "oscillator", "--gamma", "0", "--eps", "1", "--output", str(dest))
    assert code == 0 and out == ""
    rows = _csv_rows(dest.read_text())
    assert float(rows[0]["p"]) == pytest.approx(math.cos(1.0) ** 2, abs=1e-15)


def test_io_error(tmp_path, capsys):
    code, _, _ = _run(capsys, "oscillator", "--output", str(tmp_path / "missing" / "x.csv"))
    assert code == 4


def test_numerical_failure_row(capsys):
    code, out, _ = _run(capsys, "figure", "8", "--gamma", "1.5")
    assert code == 3
    assert _csv_rows(out)[0]["error"] == "RegimeError"


def test_figure1_spectrum(capsys):
    g = 0.5
    code, out, _ = _run(capsys, "figure", "1", "--n", "3", "--gamma", str(g))
    rows = _csv_rows(out)
    assert code == 0
    for key in ("re_e_plus", "im_e_plus", "re_e_minus", "im_e_minus"):
        col = np.array([float(r[key]) for r in rows])
        # a branch jump would show up as an isolated spike in the second difference
        assert np.max(np.abs(np.diff(col, 2))) < 0.01
    for key in ("im_e_plus", "im_e_minus"):
        col = np.array([float(r[key]) for r in rows])
        assert np.all(col <= 1e-15) and np.all(col >= -g - 1e-15)


@pytest.mark.xfail(strict=True, reason="the asymptotic interference zero at 7.30 is offset from "
                                       "the exact minimum, so the relative gap peaks near 7")
def test_figure4_gap():
    code, rows = _figure4()
    assert code == 0
    gaps = [float(r["rel_gap"]) for r in rows if float(r["eps"]) >= 5]
    assert max(gaps) <= 0.05


def _figure4():
    proc = subprocess.run([sys.executable, "-m", "nonad_lz.cli", "figure", "4", "--gamma", "0.3",
                           "--eps", "0.5:10:64"], capture_output=True, text=True, check=False)
    return proc.returncode, _csv_rows(proc.stdout)


def test_figure4_columns_and_gap_at_five():
    code, rows = _figure4()
    assert code == 0
    assert list(rows[0]) == ["gamma", "eps", "p_exact", "p_ddp", "rel_gap", "ddp_method"]
    assert len(rows) == 64
    first = next(r for r in rows if float(r["eps"]) >= 5)
    assert float(first["rel_gap"]) <= 0.05


def test_critical_steep_sweep(capsys):
    code, out, _ = _run(capsys, "critical", "--n", "51", "--gamma", "0", "--nu-max", "3",
                        "--source", "all")
    rows = _csv_rows(out)
    assert code == 0
    osc = [r for r in rows if r["source"] == "oscillator"]
    assert len(osc) == 3
    assert all(float(r["rel_diff_to_exact"]) < 0.10 for r in osc)


def test_validate_exit_codes(capsys):
    code, out, _ = _run(capsys, "validate", "--criteria", "4,10")
    assert code == 0
    assert all(r["passed"] == "true" for r in _csv_rows(out))


def test_missing_command_via_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nonad_lz.cli"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_parse_config_raises_usage_error():
    with pytest.raises(UsageError):
        parse_config(["exact", "--eps", "5:1:3"])
