import json
import math

import pytest

from cwlab import cli
from cwlab.critical import theorem2_curve, theorem2_eps, trace_gamma
from cwlab.errors import ZeroProximityError
from cwlab.export import curve_to_csv, read_csv, zeros_to_csv, zeros_to_json
from cwlab.landscape import f_eval
from cwlab.numerics import to_complex
from cwlab.plotting import emit_plots
from cwlab.scan import ScanConfig, extrapolate, scan, scan_point
from cwlab.zeros import Annulus, ZeroSet


def test_extrapolate_exact_for_model():
    ns = [100, 200, 400]
    assert extrapolate(ns, [0.3 + 2.0 / n for n in ns]) == pytest.approx(0.3, abs=1e-12)
    assert extrapolate([50], [0.7]) == 0.7


def test_scan_point_real_cases():
    assert scan_point(0.5, [200, 400]).label == "zero"
    hot = scan_point(2.0, [200, 400])
    assert hot.label == "positive" and hot.f_extrap > 0.1


def test_scan_point_theorem2_curve():
    r = 4.0
    eps = theorem2_eps(r)
    target = -to_complex(f_eval(complex(1 + eps, r), math.pi / r, 60).value).real
    p = scan_point(complex(1 + eps, r), [200, 400])
    assert p.label == "positive"
    assert abs(p.f_extrap - target) < 0.02


def test_scan_point_flags_numerical_zero(monkeypatch):
    import cwlab.scan as s

    def boom(*a, **k):
        raise ZeroProximityError("Z vanished")

    monkeypatch.setattr(s, "free_energy_estimate", boom)
    p = scan_point(1.2, [10, 20])
    assert p.label == "flagged" and p.f_extrap is None and "vanished" in p.note


def test_config_validation():
    with pytest.raises(ValueError):
        ScanConfig((0.5, 2), (-1, 1), (1, 4), [100])
    with pytest.raises(ValueError):
        ScanConfig((0.5, 2), (-1, 1), (4, 4), [200, 100])
    with pytest.raises(ValueError):
        ScanConfig((0.5, 2), (-1, 1), (4, 4), [100], threads=0)


def test_scan_deterministic_and_symmetric(tmp_path):
    base = dict(re_range=(0.6, 1.6), im_range=(-1.0, 1.0), resolution=(4, 5), n_list=[40, 80])
    a = scan(ScanConfig(**base, threads=1, output_dir=str(tmp_path / "a")))
    scan(ScanConfig(**base, threads=2, output_dir=str(tmp_path / "b")))
    assert (tmp_path / "a" / "scan.csv").read_bytes() == (tmp_path / "b" / "scan.csv").read_bytes()
    by_beta = {p.beta: p.f_extrap for p in a.points}
    for beta, f in by_beta.items():
        assert by_beta[beta.conjugate()] == pytest.approx(f, abs=1e-14)


def test_export_roundtrip(tmp_path):
    curve = trace_gamma(0.01, 0.005)
    rows = read_csv(curve_to_csv(curve, tmp_path / "g.csv"))
    assert [r["kind"] for r in rows] == ["gamma", "gamma"]
    assert float(rows[1]["eps"]) == pytest.approx(0.01)
    zs = ZeroSet(100, [], "psi", [], Annulus(0.02, 0.08))
    assert read_csv(zeros_to_csv(zs, tmp_path / "z.csv")) == []
    doc = json.loads(zeros_to_json(zs, tmp_path / "z.json").read_text())
    assert doc["n"] == 100
    with pytest.raises(FileNotFoundError):
        read_csv(tmp_path / "missing.csv")


def test_plots_with_empty_zero_set(tmp_path):
    zs = ZeroSet(100, [], "exact-Z", [], Annulus(0.02, 0.08))
    zpath = zeros_to_csv(zs, tmp_path / "in" / "zeros_exact_100.csv")
    written = emit_plots(tmp_path / "out", zero_csvs=[zpath])
    script = written["zeros.gp"].read_text()
    assert "zeros_exact_100.csv" in script and script.rstrip().splitlines()[-1].startswith("plot")
    assert written["zeros.png"].stat().st_size > 0
    assert (tmp_path / "out" / "zeros_exact_100.csv").is_file()


def test_combined_phase_script(tmp_path):
    cfg = ScanConfig((0.8, 1.4), (0.0, 0.6), (3, 3), [40, 80], output_dir=str(tmp_path))
    scan(cfg)
    g = curve_to_csv(trace_gamma(0.02, 0.01), tmp_path / "curve_gamma.csv")
    t = curve_to_csv(theorem2_curve([4.0, 6.0]), tmp_path / "curve_theorem2.csv")
    written = emit_plots(tmp_path, tmp_path / "scan.csv", [g, t])
    script = written["phase_diagram.gp"].read_text()
    assert script.count("plot ") == 1
    for name in ("scan.csv", "curve_gamma.csv", "curve_theorem2.csv"):
        assert name in script
    with pytest.raises(FileNotFoundError):
        emit_plots(tmp_path, tmp_path / "nope.csv")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_z_exact(capsys):
    code, out, _ = run(capsys, "z-exact", "--n", "2", "--beta", "1,1")
    assert code == 0
    lines = dict(line.split("\t", 1) for line in out.splitlines())
    assert lines["digits"] == "20"
    re, im = (float(v) for v in lines["Z"].split("\t"))
    expected = (math.e * complex(math.cos(1), math.sin(1)) + 1) / 2
    assert abs(complex(re, im) - expected) < 1e-15


def test_cli_usage_errors(capsys, tmp_path):
    assert run(capsys, "z-exact", "--n", "10")[0] == 2
    assert run(capsys, "z-exact", "--n", "10", "--beta", "1,2,3")[0] == 2
    assert run(capsys, "z-exact", "--config", str(tmp_path / "none.cfg"))[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 2


def test_cli_numerical_failure(capsys, tmp_path):
    code, _, err = run(capsys, "curve", "theorem2", "--r-list", "2", "--out", str(tmp_path))
    assert code == 1 and "numerical failure" in err
    assert run(capsys, "saddle", "--beta", "1,0")[0] == 1


def test_cli_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nn = 2\nbeta = 0.5,0\nmethod = enumerate\n")
    code, out, _ = run(capsys, "z-exact", "--config", str(cfg))
    assert code == 0 and "method\tenumeration" in out and "n\t2" in out
    code, out, _ = run(capsys, "z-exact", "--config", str(cfg), "--n", "3", "--method", "binomial")
    assert code == 0 and "method\tbinomial" in out and "n\t3" in out


def test_cli_global_options_before_subcommand(capsys):
    code, out, _ = run(capsys, "--digits", "45", "z-exact", "--n", "5", "--beta", "1.1,0.2")
    assert code == 0 and "precision_digits\t45" in out


def test_cli_curve_and_plot(capsys, tmp_path):
    code, out, _ = run(capsys, "curve", "gamma", "--eps-max", "0.01", "--step", "0.005", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "curve_gamma.csv").is_file() and (tmp_path / "curve_gamma.png").is_file()
    code, out, _ = run(capsys, "zeros", "psi", "--n", "100", "--annulus", "0.1,0.3", "--radius", "0.3",
                       "--out", str(tmp_path))
    assert code == 0 and "count=2" in out
    code, out, _ = run(capsys, "plot", "--curves", str(tmp_path / "curve_gamma.csv"),
                       "--zeros", str(tmp_path / "zeros_psi_100.csv"), "--out", str(tmp_path / "fig"))
    assert code == 0
    for name in ("phase_diagram.gp", "phase_diagram.png", "zeros.gp", "zeros.png"):
        assert (tmp_path / "fig" / name).is_file()
    assert run(capsys, "plot", "--zeros", str(tmp_path / "missing.csv"), "--out", str(tmp_path))[0] == 2


def test_cli_scan_thread_invariance(capsys, tmp_path):
    args = ["scan", "--re", "0.8,1.4", "--im=-0.5,0.5", "--res", "3,3", "--n-list", "30,60"]
    assert run(capsys, *args, "--threads", "1", "--out", str(tmp_path / "a"))[0] == 0
    assert run(capsys, *args, "--threads", "2", "--out", str(tmp_path / "b"))[0] == 0
    assert (tmp_path / "a" / "scan.csv").read_bytes() == (tmp_path / "b" / "scan.csv").read_bytes()


def test_cli_reproduce(capsys, tmp_path):
    code, out, _ = run(capsys, "reproduce", "claim-crit-curve", "--out", str(tmp_path))
    assert code == 0 and out.startswith("[PASS]")
    doc = json.loads((tmp_path / "claim-crit-curve.json").read_text())
    assert doc["criteria"][0]["passed"] is True
    assert run(capsys, "reproduce", "nonsense", "--out", str(tmp_path))[0] == 2
