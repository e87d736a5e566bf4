import csv
import math
import subprocess
import sys

import pytest

from macrohur import cli


def run(tmp_path, *args):
    code = cli.main([*args, "--out", str(tmp_path)])
    return code


def read_kv(path):
    return dict(line.split("=", 1) for line in path.read_text().splitlines())


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


# variances


def test_variances_n3_violated(tmp_path):
    assert run(tmp_path, "variances", "--n", "3", "--hbar", "0.08") == 0
    row = read_csv(tmp_path / "variances.csv")[0]
    assert row["violated"] == "1"
    assert float(row["varQ"]) == pytest.approx(1 / (2 * math.pi * 3**1.5), rel=1e-12)


def test_variances_n2_not_violated(tmp_path):
    assert run(tmp_path, "variances", "--n", "2", "--hbar", "0.02", "--d", "0.5") == 0
    assert read_csv(tmp_path / "variances.csv")[0]["violated"] == "0"
    assert read_kv(tmp_path / "summary.txt")["violated"] == "false"


def test_variances_oracle_source_any_n(tmp_path):
    assert run(tmp_path, "variances", "--n", "5", "--source", "oracle") == 0
    assert read_kv(tmp_path / "summary.txt")["convention"] == "pair_product"


def test_variances_closed_form_rejects_n4(tmp_path, capsys):
    assert run(tmp_path, "variances", "--n", "4", "--source", "closed-form") == 2
    assert not list(tmp_path.iterdir())


def test_invalid_gamma_exit_code(tmp_path, capsys):
    assert run(tmp_path, "variances", "--gamma", "1.5") == 2
    err = capsys.readouterr().err
    assert "gamma" in err and "1" in err
    assert not list(tmp_path.iterdir())


def test_invalid_config_writes_nothing(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 2\nhbar = -0.1\n")
    out = tmp_path / "out"
    out.mkdir()
    assert cli.main(["scan", "--config", str(cfg), "--out", str(out)]) == 2
    assert not list(out.iterdir())


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mass = 3\n")
    assert cli.main(["variances", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# point\nn = 3\nhbar = 0.05  # below threshold\nd = 0.5\n")
    out = tmp_path / "out"
    assert cli.main(["variances", "--config", str(cfg), "--hbar", "0.08", "--out", str(out)]) == 0
    assert read_kv(out / "summary.txt")["violated"] == "true"


# threshold


def test_threshold_table(tmp_path):
    assert run(tmp_path, "threshold", "--n-range", "2:4") == 0
    rows = read_csv(tmp_path / "thresholds.csv")
    assert [r["hbar_min_rounded"] for r in rows] == ["0.04", "0.06", "0.08"]
    assert float(rows[0]["hbar_min_exact"]) == pytest.approx(1 / (8 * math.pi), rel=1e-15)


def test_threshold_n10(tmp_path):
    assert run(tmp_path, "threshold", "--n", "10") == 0
    val = float(read_csv(tmp_path / "thresholds.csv")[0]["hbar_min_exact"])
    assert 1 / (4 * math.pi) < val < 1 / math.pi


def test_threshold_empty_range(tmp_path):
    assert run(tmp_path, "threshold", "--n-range", "5:4") == 0
    assert (tmp_path / "thresholds.csv").read_text() == "N,hbar_min_exact,hbar_min_rounded\n"


def test_threshold_skips_small_n(tmp_path, capsys):
    assert run(tmp_path, "threshold", "--n-range", "1:2") == 0
    assert "skipping N=1" in capsys.readouterr().err
    assert len(read_csv(tmp_path / "thresholds.csv")) == 1


# scan


def test_scan_default(tmp_path):
    assert run(tmp_path, "scan") == 0
    summary = read_kv(tmp_path / "summary.txt")
    fr = [float(summary[f"area_fraction.N{n}"]) for n in (2, 3, 4)]
    assert fr[0] > fr[1] > fr[2] > 0
    assert summary["nesting"] == "true"
    for n in (2, 3, 4):
        rows = read_csv(tmp_path / f"region_N{n}.csv")
        assert len(rows) == 200 * 200
        assert list(rows[0]) == ["axis1", "axis2", "varQ", "varP", "product", "bound", "violated", "flag"]


def test_scan_single_cell(tmp_path):
    assert run(tmp_path, "scan", "--n", "2", "--grid", "hbar:0.05:0.06:1", "--grid", "d:0.4:0.6:1") == 0
    assert len(read_csv(tmp_path / "region_N2.csv")) == 1


def test_scan_out_of_band_warning(tmp_path, capsys):
    assert run(tmp_path, "scan", "--n", "2", "--grid", "hbar:0.001:0.5:4", "--grid", "d:0.1:0.9:3") == 0
    assert "macroscopic band" in capsys.readouterr().err
    assert (tmp_path / "region_N2.csv").exists()


def test_scan_too_many_axes(tmp_path):
    args = ["--grid", "hbar:0.01:0.1:2", "--grid", "d:0.1:0.9:2", "--grid", "omega_alpha:0.5:2:2"]
    assert run(tmp_path, "scan", *args) == 2


# oracle-compare


@pytest.fixture(scope="module")
def compare_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("compare")
    assert cli.main(["oracle-compare", "--out", str(out)]) == 0
    return out


def test_calibration_names_one_convention(compare_dir):
    cal = read_kv(compare_dir / "calibration.txt")
    assert cal["selected_convention"] in ("unscaled", "scaled_by_n", "pair_product")
    assert sum(k == "selected_convention" for k in cal) == 1
    assert cal["selected_convention"] == "pair_product" and cal["matched"] == "true"
    assert "timestamp" in cal


def test_deviation_tables_present(compare_dir):
    for conv in ("unscaled", "scaled_by_n", "pair_product"):
        for n in (2, 3):
            for q in ("q", "p"):
                rows = read_csv(compare_dir / f"deviations_N{n}_{q}_{conv}.csv")
                assert list(rows[0]) == ["param1", "param2", "closed_form", "oracle", "abs_err", "rel_err"]


def test_appendix_comparison(compare_dir):
    rows = read_csv(compare_dir / "appendix_a2.csv")
    const = 1 / (4 * math.pi**2 * 27)
    assert all(abs(float(r["oracle"]) - const) < 1e-10 for r in rows)
    row = next(r for r in rows if float(r["param1"]) == 0.5 and float(r["param2"]) == 1.0)
    assert float(row["closed_form"]) == pytest.approx(5.028e-3, abs=5e-7)
    assert float(row["abs_err"]) == pytest.approx(abs(float(row["closed_form"]) - const), rel=1e-12)


def test_erratum_report(compare_dir):
    err = read_kv(compare_dir / "erratum.txt")
    assert float(err["parameterization_max_abs_dev"]) < 1e-12
    assert float(err["position_density_mass_N2"]) > 1.5
    assert err["n3_variances_contain_hbar"] == "false"


# determinism


def test_outputs_byte_identical(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    cfg = tmp_path / "run.cfg"
    cfg.write_text("grid = hbar:0.01:0.1:12\ngrid = d:0.05:1.0:9\nscan_n = 2,3,4\n")
    for cmd in ("scan", "oracle-compare", "variances", "report", "threshold"):
        a, b = tmp_path / f"{cmd}_a", tmp_path / f"{cmd}_b"
        for out in (a, b):
            assert cli.main([cmd, "--config", str(cfg), "--out", str(out)]) == 0
        names = sorted(p.name for p in a.iterdir())
        assert names == sorted(p.name for p in b.iterdir())
        for name in names:
            assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_seventeen_significant_digits(tmp_path):
    assert run(tmp_path, "variances") == 0
    val = read_csv(tmp_path / "variances.csv")[0]["varQ"]
    mantissa = val.split("e")[0].replace(".", "").lstrip("-")
    assert len(mantissa) == 17


# report


def test_report(tmp_path):
    assert run(tmp_path, "report") == 0
    s = read_kv(tmp_path / "summary.txt")
    assert s["regime"] == "QuasiClassicalMacroscopic"
    assert float(s["hbar_min"]) == pytest.approx(1 / (8 * math.pi), rel=1e-15)
    assert float(s["cho_ratio_q"]) == pytest.approx(2**-1.5 * 2 / math.sqrt(math.pi * 0.05), rel=1e-14)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "macrohur", "threshold", "--n", "3", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "0.06" in proc.stdout
