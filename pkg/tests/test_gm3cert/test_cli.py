import dataclasses

import pytest

from gm3cert import __version__
from gm3cert.cli.main import main
from gm3cert.write import read_certificate, read_monitor_csv, write_certificate

SHORT = ["--set", "t_end=0.0625", "--set", "output_every=512"]


def test_certify(tmp_path, capsys):
    assert main(["certify", "--out", str(tmp_path)]) == 0
    output = capsys.readouterr().out
    assert "Branch:  ViaV" in output
    certificate = read_certificate(tmp_path / "certificate.txt")
    assert certificate.valid
    assert certificate.params.p1 == 2.0


def test_certify_infeasible(tmp_path, capsys):
    assert main(["certify", "--out", str(tmp_path), "--set", "p1=4"]) == 2
    assert "INFEASIBLE" in capsys.readouterr().out
    assert not (tmp_path / "certificate.txt").exists()


def test_certify_two_component_preset(tmp_path):
    assert main(["certify", "--preset", "gm2_rothe", "--out", str(tmp_path)]) == 0


def test_certify_with_a_config_file(tmp_path, data_dir, capsys):
    config = str(data_dir / "small_run.ini")
    argv = ["certify", "--out", str(tmp_path), "--config", config]
    assert main(argv) == 0
    assert "Valid:   True" in capsys.readouterr().out


def test_simulate_and_resume(tmp_path, capsys):
    first = tmp_path / "first"
    assert main(["simulate", "--out", str(first), *SHORT]) == 0
    output = capsys.readouterr().out
    assert "Outcome: CompletedBounded at t = 0.0625" in output
    assert "Warning" not in output
    for name in ("config.ini", "monitor.csv", "final.snapshot"):
        assert (first / name).exists()
    rows = read_monitor_csv(first / "monitor.csv")
    assert rows["t"].iloc[0] == 0.0
    assert rows["t"].iloc[-1] == 0.0625

    second = tmp_path / "second"
    argv = [
        "simulate",
        "--out", str(second),
        "--set", "t_end=0.125",
        "--resume", str(first / "final.snapshot"),
    ]
    assert main(argv) == 0
    resumed = read_monitor_csv(second / "monitor.csv")
    assert resumed["t"].iloc[0] > 0.0625
    assert resumed["t"].iloc[-1] == 0.125


def test_simulate_blowup(tmp_path, capsys):
    assert main(["simulate", "--preset", "blowup_ode", "--out", str(tmp_path)]) == 3
    output = capsys.readouterr().out
    assert "Warning: this run has no certificate" in output
    assert "BlowUpSuspected (u)" in output


def test_verify_lemmas_only(tmp_path, capsys):
    assert main(["verify", "--lemmas-only", "--out", str(tmp_path)]) == 0
    output = capsys.readouterr().out
    assert "All checks passed." in output
    assert "run completed" not in output


def test_verify_with_a_short_run(tmp_path, capsys):
    assert main(["verify", "--out", str(tmp_path), *SHORT]) == 0
    output = capsys.readouterr().out
    assert "floors hold" in output
    assert "All checks passed." in output


def test_verify_rejects_a_lowered_kappa(tmp_path, capsys):
    assert main(["certify", "--out", str(tmp_path)]) == 0
    path = tmp_path / "certificate.txt"
    certificate = read_certificate(path)
    lowered = dataclasses.replace(certificate, kappa=certificate.kappa / 10)
    write_certificate(lowered, path)
    capsys.readouterr()

    argv = ["verify", "--lemmas-only", "--out", str(tmp_path)]
    argv += ["--certificate", str(path)]
    assert main(argv) == 5
    output = capsys.readouterr().out
    assert "Some checks FAILED." in output
    assert "kappa consistent" in output


def test_verify_infeasible(tmp_path, capsys):
    assert main(["verify", "--out", str(tmp_path), "--set", "p1=4"]) == 2
    assert "Nothing to verify" in capsys.readouterr().out


def test_sweep(tmp_path, capsys):
    argv = [
        "sweep",
        "--out", str(tmp_path),
        "--set", "t_end=0.01",
        "--set", "grid.n=8",
        "--x", "p1:2:4:2",
        "--y", "b1:1:2:2",
    ]
    assert main(argv) == 0
    assert "4 points computed, 0 resumed" in capsys.readouterr().out
    assert (tmp_path / "sweep.csv").exists()

    assert main([*argv, "--resume"]) == 0
    assert "0 points computed, 4 resumed" in capsys.readouterr().out


def test_plot(tmp_path, capsys):
    assert main(["simulate", "--out", str(tmp_path), *SHORT]) == 0
    assert main(["plot", "--out", str(tmp_path)]) == 0
    for name in ("lyapunov.svg", "extrema.svg", "floor_margins.svg"):
        assert (tmp_path / name).read_text().startswith("<?xml")


def test_plot_of_an_empty_csv(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert main(["plot", str(empty), "--out", str(tmp_path)]) == 1
    assert "Can't plot" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["certify", "--set", "p1"],
        ["certify", "--set", "zeta=1"],
        ["certify", "--set", "a1=-1"],
        ["certify", "--config", "missing.ini"],
        ["sweep", "--x", "p1:1:2", "--y", "b1:1:2:2"],
    ],
)
def test_bad_input_exits_with_one(argv, tmp_path, capsys):
    assert main([*argv, "--out", str(tmp_path)]) == 1
    assert capsys.readouterr().err.startswith("Error:")


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_outputs_are_byte_identical_across_runs(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    for out in (first, second):
        assert main(["simulate", "--out", str(out), *SHORT]) == 0
        assert main(["certify", "--out", str(out), *SHORT]) == 0
    for name in ("monitor.csv", "final.snapshot", "config.ini", "certificate.txt"):
        assert (first / name).read_bytes() == (second / name).read_bytes(), name
