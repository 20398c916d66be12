"""Command line entry point."""

import os

import pytest

from gradplast.cases import plotting
from gradplast.cases.outputs import OutputSeries, STRESS_STRAIN_HEADERS, write_outputs
from gradplast.core.errorhandler import ErrorCode, GradPlastError
from gradplast.core.logger import Logger
from gradplast.main import build_parser, main

SMALL = {"case": {"kind": "shear_layer", "name": "cli"}, "geometry": {"ny": 4},
         "loading": {"kind": "monotonic", "max_strain": 0.002}, "solver": {"dt_initial": 0.05}}


class TestParser:
    def test_common_flags_on_subcommand(self):
        args = build_parser().parse_args(["sweep", "case.json", "material.zeta=0,100", "--threads", "2",
                                          "--log-level", "q"])
        assert args.command == "sweep"
        assert args.threads == 2
        assert args.log_level == "q"
        assert args.out is None

    def test_sweep_takes_several_assignments(self):
        args = build_parser().parse_args(
            ["sweep", "case.json", "model.Lstar_ratio=1,2", "material.zeta=0,100"])
        assert args.assignments == ["model.Lstar_ratio=1,2", "material.zeta=0,100"]

    def test_invalid_level(self):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args(["run", "case.json", "--log-level", "loud"])
        assert exc.value.code == 2

    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


def test_mesh_dump(config_file, tmp_path):
    out = tmp_path / "dump"
    assert main(["mesh-dump", config_file(SMALL), "--out", str(out), "--log-level", "q"]) == 0
    text = (out / "mesh.txt").read_text(encoding="utf-8")
    assert text.startswith("# nodes ")
    assert "# elements 4" in text
    assert "tie " in text


def test_missing_config_exits_with_config_code(tmp_path):
    assert main(["run", str(tmp_path / "absent.json"), "--log-level", "q"]) == 2


def test_invalid_config_exits_with_config_code(config_file):
    bad = dict(SMALL, material={"nu": 0.7})
    assert main(["mesh-dump", config_file(bad), "--log-level", "q"]) == 2


def test_plot_missing_directory(tmp_path):
    assert main(["plot", str(tmp_path / "nothing"), "--log-level", "q"]) == 6


def test_plot_without_matplotlib(tmp_path, monkeypatch):
    monkeypatch.setattr(plotting, "MATPLOTLIB_AVAILABLE", False)
    with pytest.raises(GradPlastError) as exc:
        plotting.plot_run(str(tmp_path))
    assert exc.value.error_code == ErrorCode.SYS_DEPENDENCY_MISSING
    assert main(["plot", str(tmp_path), "--log-level", "q"]) == 1


def test_plot_run_directory(tmp_path):
    stress = OutputSeries("stress_strain", STRESS_STRAIN_HEADERS)
    profile = OutputSeries("profile_000", ["x2", "gamma_1", "rho_1"])
    for i in range(3):
        stress.append([i, 0.1 * i, 0.001 * i, 10.0 * i])
        profile.append([0.5 * i, 1e-3 * i, -1e-3])
    write_outputs([stress, profile], str(tmp_path))
    assert main(["plot", str(tmp_path), "--log-level", "q"]) == 0
    for name in ("stress_strain.png", "profile_000_gamma.png", "profile_000_rho.png"):
        assert os.path.exists(tmp_path / name)


@pytest.mark.slow
def test_run_writes_results(config_file, tmp_path):
    out = tmp_path / "results"
    assert main(["run", config_file(SMALL), "--out", str(out), "--log-level", "q"]) == 0
    for name in ("stress_strain.csv", "averages.csv", "profile_000.csv", "manifest.json"):
        assert (out / name).exists()
    assert any(p.suffix == ".log" for p in (out / "logs").iterdir())
    Logger().set_run_directory(None)
