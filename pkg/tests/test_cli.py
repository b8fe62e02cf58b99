import csv
import json
import shutil
import subprocess
import sys

import pytest

from nonrecip.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from nonrecip.params import SystemParams

SMALL_SWEEP = ["sweep", "--omega-c", "100:1000:2:log", "--v", "0:250:2"]


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_transmit_defaults(tmp_path, capsys):
    assert run(tmp_path, "transmit") == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["co"]["transmittance"] > report["counter"]["transmittance"]
    assert report == json.loads((tmp_path / "transmit.json").read_text())
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "transmit"
    assert manifest["outputs"] == ["transmit.json"]
    assert SystemParams(**{k: v for k, v in manifest["params"].items() if k != "units"}) == SystemParams()


def test_transmit_at_rest_and_uncoupled(tmp_path, capsys):
    assert run(tmp_path, "transmit", "--set", "velocity=0") == EXIT_OK
    assert json.loads(capsys.readouterr().out)["eta"] == 0.0
    assert run(tmp_path, "transmit", "--g-kappa", "0", "--direction", "co") == EXIT_OK
    t = json.loads(capsys.readouterr().out)["co"]["transmittance"]
    assert t == pytest.approx(0.07256, abs=5e-6)


def test_sweep_rows_and_rest_row(tmp_path):
    assert run(tmp_path, *SMALL_SWEEP) == EXIT_OK
    rows = read_csv(tmp_path / "sweep.csv")
    assert rows[0] == ["omega_c", "v", "t_plus", "t_minus", "eta"]
    assert len(rows) == 5
    assert [r[4] for r in rows[1:] if float(r[1]) == 0] == ["0.0", "0.0"]
    side = json.loads((tmp_path / "sweep.json").read_text())
    assert side["params_fingerprint"] == SystemParams().fingerprint()
    assert side["convention_flags"]["sign_convention"] == "as_printed"


def test_sweep_shows_dip(tmp_path):
    assert run(tmp_path, "sweep", "--omega-c", "100:2000:300:log", "--v", "250:250.5:2") == EXIT_OK
    rows = [list(map(float, r)) for r in read_csv(tmp_path / "sweep.csv")[1:] if float(r[1]) == 250]
    t_minus = [r[3] for r in rows]
    i = t_minus.index(min(t_minus))
    assert 0 < i < len(rows) - 1
    assert 400 < rows[i][0] / 6.283185307179586e6 < 700


def _data_files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.name != "manifest.json"}


@pytest.mark.parametrize(
    "argv",
    [
        SMALL_SWEEP,
        ["transmit"],
        ["spectrum", "--delta-p=-50:50:11"],
        ["eigen", "--t", "1e-9"],
        ["dynamics", "--t-end-kappa", "2", "--stride", "50"],
        ["fwhm", "--g-grid-kappa", "1:10:4:log", "--v", "0:3000:601"],
    ],
)
def test_byte_identical_reruns_and_replay(tmp_path, argv, capsys):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert run(a, *argv) == EXIT_OK
    assert run(b, *argv) == EXIT_OK
    assert _data_files(a) == _data_files(b)
    replay = [x for x in argv] + ["--config", str(a / "manifest.json")]
    assert run(c, *replay) == EXIT_OK
    assert _data_files(a) == _data_files(c)


def test_threads_do_not_change_bytes(tmp_path):
    argv = ["sweep", "--omega-c", "10:5000:40:log", "--v", "0:500:21"]
    assert run(tmp_path / "a", *argv) == EXIT_OK
    assert run(tmp_path / "b", *argv, "--threads", "4") == EXIT_OK
    assert (tmp_path / "a" / "sweep.csv").read_bytes() == (tmp_path / "b" / "sweep.csv").read_bytes()


def test_lf_line_endings(tmp_path):
    run(tmp_path, *SMALL_SWEEP)
    assert b"\r\n" not in (tmp_path / "sweep.csv").read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--omega-c", "1:2"],
        ["sweep", "--v", "0:1:2:log"],
        ["fwhm", "--g-grid-kappa", "1:10:0"],
        ["fwhm"],
        ["transmit", "--set", "kappa1=-1"],
        ["transmit", "--set", "nonsense=1"],
        ["transmit", "--set", "novalue"],
        ["transmit", "--set", "delta_a=5"],
        ["dynamics", "--dt", "1"],
    ],
)
def test_usage_errors(tmp_path, argv, capsys):
    assert run(tmp_path, *argv) == EXIT_USAGE
    assert "error" in capsys.readouterr().err
    assert not (tmp_path / "manifest.json").exists()


def test_bad_config_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(tmp_path, "transmit", "--config", str(bad)) == EXIT_USAGE
    assert "--config" in capsys.readouterr().err


def test_argparse_usage_exit():
    with pytest.raises(SystemExit) as info:
        main(["transmit", "--direction", "sideways"])
    assert info.value.code == 2


def test_numeric_failures(tmp_path, capsys):
    # no damping at all: steady state undefined
    argv = ["transmit", "--set", "gamma3=0", "--set", "gamma12=0", "--set", "velocity=0"]
    assert run(tmp_path, *argv) == EXIT_NUMERIC
    assert "numerical failure" in capsys.readouterr().err
    # fwhm scan whose peaks never resolve
    argv = ["fwhm", "--g-grid-kappa", "1:10:4", "--v", "0:1:11"]
    assert run(tmp_path, *argv) == EXIT_NUMERIC


def test_param_key_named_in_error(tmp_path, capsys):
    run(tmp_path, "transmit", "--set", "gamma3=-2")
    assert "gamma3" in capsys.readouterr().err


def test_environment_override(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("NONRECIP_VELOCITY", "0")
    assert run(tmp_path, "transmit") == EXIT_OK
    assert json.loads(capsys.readouterr().out)["eta"] == 0.0
    # flags win over environment
    assert run(tmp_path, "transmit", "--set", "velocity=250") == EXIT_OK
    assert json.loads(capsys.readouterr().out)["eta"] > 0


def test_units_flag(tmp_path, capsys):
    p = SystemParams()
    argv = ["transmit", "--units", "rad_per_s", "--set", f"g={p.g!r}",
            "--set", f"omega_c_rabi={p.omega_c_rabi!r}", "--set", f"kappa1={p.kappa1!r}",
            "--set", f"kappa2={p.kappa2!r}", "--set", f"kappa_c={p.kappa_c!r}",
            "--set", f"gamma3={p.gamma3!r}"]
    assert run(tmp_path, *argv) == EXIT_OK
    a = json.loads(capsys.readouterr().out)
    assert run(tmp_path, "transmit") == EXIT_OK
    b = json.loads(capsys.readouterr().out)
    assert a["eta"] == pytest.approx(b["eta"], rel=1e-14)


def test_eigen_big_omega(tmp_path):
    argv = ["eigen", "--units", "rad_per_s", "--set", "g=3", "--set", "omega_c_rabi=4",
            "--set", "gamma3=0", "--set", "gamma12=0", "--set", "velocity=0", "--t", "0"]
    assert run(tmp_path, *argv) == EXIT_OK
    doc = json.loads((tmp_path / "eigen.json").read_text())
    assert doc["big_omega"] == 5.0
    assert doc["basis"] == ["|1>", "|3>", "|2>"]
    assert doc["evolution"][0]["state"][0] == pytest.approx([1.0, 0.0], abs=1e-14)
    for v in doc["overlaps"].values():
        assert v == pytest.approx(1.0, abs=1e-12)


def test_dynamics_zero_drive(tmp_path):
    assert run(tmp_path, "dynamics", "--probe-amplitude", "0", "--t-end-kappa", "1",
               "--stride", "10") == EXIT_OK
    rows = read_csv(tmp_path / "trajectory.csv")
    assert rows[0] == ["t", "re_a", "im_a", "re_s13", "im_s13", "re_s12", "im_s12"]
    assert all(float(x) == 0.0 for r in rows[1:] for x in r[1:])


def test_dynamics_residual(tmp_path):
    assert run(tmp_path, "dynamics") == EXIT_OK
    doc = json.loads((tmp_path / "dynamics.json").read_text())
    assert doc["residual_vs_closed_form"] < 1e-6
    assert doc["linear_solve_vs_closed_form"] < 1e-12


def test_fwhm_synthetic(tmp_path):
    argv = ["fwhm", "--g-grid-kappa", "1:10:6:log", "--v", "0:3000:300001", "--synthetic-width", "2"]
    assert run(tmp_path, *argv) == EXIT_OK
    fit = json.loads((tmp_path / "fwhm_fit.json").read_text())
    assert fit["exponent"] == pytest.approx(2.0, abs=1e-3)
    assert fit["synthetic"] is True


@pytest.mark.skipif(shutil.which("nonrecip") is None, reason="console script not installed")
def test_console_script(tmp_path):
    out = subprocess.run(["nonrecip", "transmit", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "eta" in json.loads(out.stdout)


def test_module_entry(tmp_path):
    out = subprocess.run([sys.executable, "-m", "nonrecip", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "0.1.0" in out.stdout
