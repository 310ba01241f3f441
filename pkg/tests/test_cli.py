import json
import math
import subprocess
import sys

import pytest

from zeno_sense import cli, oracle, qfi

SMALL = {
    "fig2": ["--theta", "0:1.4:8", "--t", "1:50:9:log"],
    "fig3": ["--tau", "0:0.99:12", "--trace-t", "0:5:21"],
    "fig4": ["--tau", "0.05:0.9:6", "--t", "0.1:20:30"],
    "fig5": ["--theta", "0.1:1.5:8", "--t", "0.5:60:12:log"],
}


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("fig", sorted(SMALL))
def test_figure_csv_is_deterministic(fig, tmp_path, capsys):
    paths = []
    for k in range(2):
        out = tmp_path / f"run{k}" / f"{fig}.csv"
        out.parent.mkdir()
        code, stdout, _ = run([fig, "--out", str(out), *SMALL[fig]], capsys)
        assert code == 0
        assert json.loads(stdout)["command"] == fig
        paths.append(out)
    a, b = (p.read_bytes() for p in paths)
    assert a == b
    assert b"\r" not in a
    for companion in paths[0].parent.glob(f"{fig}_*.csv"):
        assert companion.read_bytes() == (paths[1].parent / companion.name).read_bytes()


def test_csv_format(tmp_path, capsys):
    out = tmp_path / "fig3.csv"
    run(["fig3", "--out", str(out), *SMALL["fig3"]], capsys)
    lines = out.read_text().splitlines()
    assert lines[0] == "tau,t_c"
    assert lines[1] == "0,inf"
    value = lines[2].split(",")[1]
    assert float(value) == float(f"{float(value):.17g}")
    traces = (tmp_path / "fig3_traces.csv").read_text().splitlines()
    assert traces[0] == "t,mu_z_coherent,mu_z_zeno,mu_z_anti_zeno"


def test_fig2_single_point(tmp_path, capsys):
    out = tmp_path / "p.csv"
    code, _, _ = run(["fig2", "--out", str(out), "--theta", "0:0.1:2", "--t", "1:2:2"], capsys)
    assert code == 0
    row = out.read_text().splitlines()[1].split(",")
    assert (float(row[0]), float(row[1])) == (0.0, 1.0)
    assert float(row[2]) == pytest.approx(1.0)


def test_companion_files(tmp_path, capsys):
    for fig, suffix in (("fig4", "ridge"), ("fig5", "boundary")):
        out = tmp_path / f"{fig}.csv"
        assert run([fig, "--out", str(out), *SMALL[fig]], capsys)[0] == 0
        assert (tmp_path / f"{fig}_{suffix}.csv").exists()


def test_spotcheck_flag(tmp_path, capsys):
    code, stdout, _ = run(["fig4", "--out", str(tmp_path / "f.csv"), "--oracle-spotcheck", "3", *SMALL["fig4"]], capsys)
    assert code == 0
    assert json.loads(stdout)["spotcheck"]["cells"] == 3


def test_spotcheck_failure_exits_one(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(oracle, "oracle_qfi_coherent", lambda *a, **k: 123.0)
    code, _, err = run(["fig2", "--out", str(tmp_path / "f.csv"), "--oracle-spotcheck", "2", *SMALL["fig2"]], capsys)
    assert code == 1
    assert "FAILED" in err


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# shared\nmu0 = 0.5\n\n[fig2]\ntheta = 0.2:0.3:2  ; two rows\nt = 1:2:2\n", encoding="utf-8")
    out = tmp_path / "a.csv"
    assert run(["fig2", "--config", str(cfg), "--out", str(out)], capsys)[0] == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 5
    assert float(rows[1].split(",")[0]) == pytest.approx(0.2)
    # command line beats the file
    assert run(["fig2", "--config", str(cfg), "--out", str(out), "--theta", "0.5:0.6:3"], capsys)[0] == 0
    assert len(out.read_text().splitlines()) == 7
    first = out.read_text().splitlines()[1].split(",")
    om_val = qfi.qfi_coherent(cli.PrecessionFrequency.from_theta(0.5), 0.5, 1.0)
    assert float(first[2]) == pytest.approx(float(om_val))


@pytest.mark.parametrize(
    "argv",
    [
        ["fig2", "--t", "5:1:3"],
        ["fig2", "--theta", "0:2:3"],
        ["fig3", "--tau", "0.1:1.5:3"],
        ["fig4", "--mu0", "1.5"],
        ["fig9"],
        ["spins", "three", "--b1", "1", "--b2", "0.3"],
        ["spins", "two", "--b", "0"],
        ["spins", "many", "--couplings", "0,1;2,0"],
    ],
)
def test_configuration_errors_exit_two(argv, tmp_path, capsys):
    code, _, _ = run(argv + (["--out", str(tmp_path / "x.csv")] if argv[0].startswith("fig") and argv[0] != "fig9" else []), capsys)
    assert code == 2


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(["fig2", "--config", str(cfg)], capsys)
    assert code == 2
    assert "colour" in err


def test_validate_passes(capsys):
    code, stdout, _ = run(["validate", "--check", "xi_endpoints", "--check", "two_spin_mapping"], capsys)
    assert code == 0
    assert "2/2 checks passed" in stdout


def test_validate_reports_injected_failure(capsys, monkeypatch):
    monkeypatch.setattr(qfi, "d_alpha_d_wx", lambda om, tau: -qfi.bloch.alpha(om, tau) * 0 + 1.0)
    code, stdout, _ = run(["validate", "--check", "d_alpha_d_wx_finite_difference"], capsys)
    assert code == 1
    assert "FAIL  d_alpha_d_wx_finite_difference" in stdout


def parse_report(stdout):
    return dict(line.split(" = ", 1) for line in stdout.strip().splitlines())


def test_spins_two_on_resonance(capsys):
    code, stdout, _ = run(["spins", "two", "--b", "1", "--delta", "0"], capsys)
    assert code == 0
    rep = parse_report(stdout)
    assert rep["condition"].startswith("Hartmann-Hahn")
    assert float(rep["projective_bound"]) == pytest.approx(2 / math.e)
    assert float(rep["mu0_exact"]) == 0.0


def test_spins_two_with_thermal_polarization(capsys):
    code, stdout, _ = run(["spins", "two", "--b", "1", "--delta", "3", "--omega0-I", "0.2", "--kT", "1"], capsys)
    rep = parse_report(stdout)
    assert float(rep["mu0"]) == pytest.approx(math.tanh(0.1))
    assert float(rep["anti_zeno_tau"]) > 0
    assert float(rep["projective_bound"]) == pytest.approx(20 / math.e)


def test_spins_three(capsys):
    code, stdout, _ = run(["spins", "three", "--b1", "1", "--b2", "1"], capsys)
    rep = parse_report(stdout)
    assert float(rep["omega_x"]) == pytest.approx(-math.sqrt(2) / 2)
    assert float(rep["omega_z"]) == 0.0


def test_spins_many(capsys):
    b = "0,1,1,1;1,0,1,1;1,1,0,1;1,1,1,0"
    code, stdout, _ = run(["spins", "many", "--couplings", b, "--tau", "0.02"], capsys)
    rep = parse_report(stdout)
    b_eff = math.sqrt(3 / 4)
    assert float(rep["b_eff"]) == pytest.approx(b_eff)
    assert float(rep["qfi_max"]) == pytest.approx(32 * cli.phi(1.0) / b_eff**2)
    assert float(rep["t_max"]) == pytest.approx(8 * cli.xi(1.0) / (b_eff**2 * 0.02))


def test_console_script_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "zeno_sense.cli", "spins", "three", "--b1", "1", "--b2", "-1"],
        capture_output=True, text=True, cwd=tmp_path,
    )
    assert res.returncode == 0
    assert "omega_x" in res.stdout
