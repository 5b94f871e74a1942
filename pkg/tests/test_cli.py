import csv
import io
import shlex
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from floqlie.cli import basis_index, format_config, parse_config, read_config_file, run, write_csv
from floqlie.exceptions import ConfigurationError, ParameterError
from floqlie.models import build_amplifier, build_dicke_modulated, build_two_atom

RABI = ["--model=rabi", "--omega0=3", "--nu=1", "--g=0.05", "--kmax=6"]


def summary_fields(line, part="result"):
    head, _, tail = line.partition(" RESULT ")
    text = tail if part == "result" else head
    return dict(tok.split("=", 1) for tok in text.split() if "=" in tok)


def test_coeffs_rabi(capsys):
    assert run(["coeffs", *RABI]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "k,h_k,eps_k,g_eff_k"
    rows = list(csv.reader(out[1:8]))
    assert [int(r[0]) for r in rows] == list(range(7))
    assert float(rows[0][2]) == 1.0
    summary = out[-1]
    assert summary.startswith("coeffs rabi ") and " RESULT " in summary
    res = summary_fields(summary)
    assert int(res["resonant_k"]) == 2
    assert float(res["g_eff_resonant"]) == pytest.approx(-9 / 4 * 0.05 * (0.05 / 3) ** 2, rel=1e-12)


def test_coeffs_other_models(capsys):
    assert run(["coeffs", "--model=two_atom", "--omega1=10", "--omega2=30", "--omega_c=40", "--g0=1",
                "--g1=1", "--g2=1", "--nu=39.9"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("name,value\n") and "nu_star," in out
    assert run(["coeffs", "--model=dicke", "--omega0=10", "--omega1=10", "--g=0.05", "--nu=3.3",
                "--epsilon_index=2.4048", "--kmax=3"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("k,J_k,g_J_k\n")
    assert abs(float(summary_fields(out.splitlines()[-1])["g_J0"])) < 1e-6
    assert run(["coeffs", "--model=nonlinear", "--algebra=su2", "--omega0=10", "--g=0.1",
                "--nu=3.3", "--epsilon_index=0.5", "--kmax=2"]) == 0
    assert capsys.readouterr().out.startswith("m,tilde_I_m\n")
    assert run(["coeffs", "--model=parosc", "--omega0=1", "--gamma=0.1", "--nu=2", "--kmax=2"]) == 0
    line = capsys.readouterr().out.splitlines()[-1]
    assert float(summary_fields(line)["g_eff_resonant"]) == pytest.approx(0.05 / 2, rel=1e-12)
    assert float(summary_fields(line, "params")["epsilon_index"]) == pytest.approx(0.05)


def test_tables_ratios(capsys):
    assert run(["tables", "--model=rabi", "--omega0=1", "--g=0.05"]) == 0
    res = summary_fields(capsys.readouterr().out.splitlines()[-1])
    assert float(res["ratio_0"]) == 1.0 and float(res["ratio_1"]) == pytest.approx(1.0)
    assert float(res["ratio_2"]) == pytest.approx(0.9)
    assert run(["tables", "--model=parosc", "--omega0=1", "--gamma=0.1"]) == 0
    res = summary_fields(capsys.readouterr().out.splitlines()[-1])
    for k in range(3):
        assert float(res[f"ratio_{k}"]) == pytest.approx(1.0, rel=1e-12)


def test_evolve_rabi_writes_file(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    assert run(["evolve", "--model=rabi", "--omega0=1", "--nu=1", "--g=0.01", "--t_final=200",
                f"--output={out}"]) == 0
    text = out.read_bytes()
    assert text.startswith(b"t,value\n") and b"\r" not in text
    rows = list(csv.reader(io.StringIO(text.decode())))[1:]
    assert float(rows[0][1]) == -0.5
    summary = capsys.readouterr().out
    assert summary.count("\n") == 1 and "output=" not in summary


def test_compare_pass_and_fail(capsys):
    base = ["compare", "--model=rabi", "--omega0=1", "--nu=1", "--g=0.01", "--final=0"]
    assert run(base + ["--tolerance=0.05"]) == 0
    res = summary_fields(capsys.readouterr().out.strip())
    assert res["passed"] == "true" and res["quantity"] == "omega_rabi"
    assert run(base + ["--tolerance=1e-9"]) == 4


def test_exit_code_config_errors(capsys):
    assert run(["coeffs", *RABI, "--bogus=1"]) == 2
    assert run(["coeffs", "--model=rabi", "--omega0=3", "--g=0.05"]) == 2
    err = capsys.readouterr().err
    assert "'nu'" in err
    assert run(["coeffs", "--model=unicorn", "--nu=1"]) == 2
    assert run(["coeffs", *RABI[:-1], "--kmax=two"]) == 2
    assert run(["scan", "--model=rabi", "--omega0=1", "--g=0.01", "--nu_min=1", "--nu_max=0.9",
                "--nu_step=0.01"]) == 2
    assert run(["tables", "--model=amplifier", "--omega_a=5", "--omega_b=10", "--g=0.1"]) == 2
    assert run(["frobnicate", *RABI]) == 2


def test_gamma_xor_epsilon(capsys):
    args = ["coeffs", "--model=amplifier", "--omega_a=5", "--omega_b=10", "--g=0.1", "--nu=20"]
    assert run(args) == 2
    assert run(args + ["--gamma=3.6", "--epsilon_index=0.9"]) == 2
    capsys.readouterr()
    assert run(args + ["--gamma=3.6"]) == 0
    line = capsys.readouterr().out.splitlines()[-1]
    assert float(summary_fields(line, "params")["epsilon_index"]) == pytest.approx(0.9)


def test_exit_code_numeric_error(capsys, tmp_path):
    assert run(["coeffs", "--model=two_atom", "--omega1=40", "--omega2=30", "--omega_c=40", "--g0=1",
                "--g1=1", "--g2=1", "--nu=39.9"]) == 3
    assert "ResonanceError" in capsys.readouterr().err
    assert run(["coeffs", *RABI, f"--output={tmp_path / 'missing' / 'x.csv'}"]) == 3


def test_config_file_and_override(tmp_path, capsys):
    path = tmp_path / "run.cfg"
    path.write_text("# rabi coefficients\nmodel=rabi\nomega0 = 3   # trailing comment\nnu=1\n"
                    "g=0.05\n\nkmax=4\n", encoding="utf-8")
    assert run(["coeffs", f"--config={path}", "--kmax=2"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 1 + 3 + 1
    path.write_text("model=rabi\nomega_zero=3\n", encoding="utf-8")
    assert run(["coeffs", f"--config={path}"]) == 2
    assert "omega_zero" in capsys.readouterr().err
    assert run(["coeffs", f"--config={tmp_path / 'nope.cfg'}"]) == 2


def test_dump_config_roundtrip(tmp_path, capsys):
    argv = ["scan", "--model=two_atom", "--omega1=10", "--omega2=30", "--omega_c=40", "--g0=1",
            "--g1=1", "--g2=1", "--nu_min=39.7", "--nu_max=40.1", "--nu_step=0.002",
            "--initial=gg0", "--final=ee0", "--t_final=0.1"]
    assert run(argv + ["--dump-config"]) == 0
    dumped = capsys.readouterr().out
    path = tmp_path / "dump.cfg"
    path.write_text(dumped, encoding="utf-8")
    again, _ = parse_config(["scan", f"--config={path}"])
    first, _ = parse_config(argv)
    assert again == first
    assert format_config(again) == dumped


def test_read_config_rejects_garbage(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("model rabi\n", encoding="utf-8")
    with pytest.raises(ConfigurationError, match="line 1"):
        read_config_file(path)


def test_csv_byte_identical(tmp_path):
    files = []
    for i in range(2):
        out = tmp_path / f"c{i}.csv"
        assert run(["coeffs", *RABI, f"--output={out}"]) == 0
        files.append(out.read_bytes())
    assert files[0] == files[1]


def test_write_csv_format(tmp_path):
    path = tmp_path / "h.csv"
    write_csv(path, ["nu", "p_avg"], [])
    assert path.read_bytes() == b"nu,p_avg\n"
    x = 0.1 + 0.2
    write_csv(path, ["a", "b"], [(x, 3)])
    val = path.read_text().splitlines()[1].split(",")[0]
    assert float(val) == x and len(val.replace(".", "").lstrip("0")) == 17
    with pytest.raises(ParameterError):
        write_csv(path, ["a", "b"], [(1,)])


def test_basis_labels():
    amp = build_amplifier(5.0, 10.0, 20.0, 3.6, 0.1, Na=4, Nb=6)
    assert basis_index(amp, "0a2b", "final") == 2
    assert basis_index(amp, "1a0b", "final") == 6
    two = build_two_atom(10.0, 30.0, 40.0, 39.9, 1.0, 1.0, 1.0, Nc=6)
    # spin factors list the excited level first
    assert basis_index(two, "ee0", "final") == 0
    assert basis_index(two, "gg0", "initial") == two.space.basis_index((1, 1, 0))
    dicke = build_dicke_modulated(0.5, 10.0, 10.0, 3.3, 0.5, 0.05, N=8)
    assert basis_index(dicke, "g1", "final") == 9
    assert basis_index(dicke, "5", "final") == 5
    with pytest.raises(ConfigurationError, match="final"):
        basis_index(dicke, "x9", "final")
    with pytest.raises(ConfigurationError):
        basis_index(amp, "0a9b", "final")
    with pytest.raises(ConfigurationError):
        basis_index(dicke, "99", "initial")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "floqlie.cli", "tables", "--model=rabi",
                           "--omega0=1", "--g=0.05"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.startswith("row,interaction,")


def readme_commands():
    text = (Path(__file__).parents[1] / "README.md").read_text(encoding="utf-8")
    return [line for line in text.splitlines() if line.startswith("floqlie ") and "<command>" not in line]


@pytest.mark.slow
@pytest.mark.parametrize("line", readme_commands())
def test_readme_examples(line, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert run(shlex.split(line)[1:]) == 0
