"""End-to-end runs of the benchmark cases on coarse meshes."""

import filecmp
import os

import numpy as np
import pytest

from gradplast.cases import CASES, run_case
from gradplast.cases import postprocess as post

pytestmark = pytest.mark.slow

SMALL_LAYER = dict(geometry={"ny": 4}, loading={"max_strain": 0.005}, solver={"dt_initial": 0.05})
ZETA_LAYER = dict(geometry={"ny": 10}, solver={"dt_initial": 0.05})
BICRYSTAL = dict(case={"kind": "bicrystal_shear"}, geometry={"nx": 20}, solver={"dt_initial": 1.0})
MU_TABLE1 = 260000.0 / (2.0 * 1.3)


def _profile(outputs, index=0):
    return outputs.get(f"profile_{index:03d}")


def _row_at(series, t):
    times = series.column("time")
    i = int(np.flatnonzero(np.isclose(times, t, rtol=0, atol=1e-9))[0])
    return i


def _curve(outputs):
    stress = outputs.get("stress_strain")
    return stress.column("Gamma"), stress.column("sigma12_avg")


def _r_squared(x, y):
    coeffs = np.polyfit(x, y, 1)
    residual = y - np.polyval(coeffs, x)
    return 1.0 - residual @ residual / np.sum((y - y.mean()) ** 2)


def _final_tangent(outputs):
    load, stress = _curve(outputs)
    return (stress[-1] - stress[-2]) / (load[-1] - load[-2])


def _gb_slip(outputs, W=1.0):
    profile = _profile(outputs)
    x1 = profile.column("x1")
    at_gb = np.isclose(x1, 0.5 * W) | np.isclose(x1, 1.5 * W)
    return float(np.abs(profile.column("gamma_1")[at_gb]).max())


class TestShearLayer:
    def test_micro_free_without_length_scale_is_uniform(self, make_config, tmp_path):
        cfg = make_config(**{**SMALL_LAYER, "geometry": {"ny": 4, "micro_bc": "free"}}, model={"Lstar": 0.0})
        out = str(tmp_path / "run")
        outputs = run_case(cfg, out)

        gamma = _profile(outputs).column("gamma_1")
        assert np.abs(gamma).max() > 0.0
        assert np.ptp(gamma) <= 1e-6 * np.abs(gamma).max()
        stress = outputs.get("stress_strain")
        assert stress.headers == ["step", "time", "Gamma", "sigma12_avg"]
        assert stress.column("Gamma")[-1] == pytest.approx(0.005)
        assert stress.column("sigma12_avg")[-1] > 0.0
        for name in ("stress_strain.csv", "averages.csv", "profile_000.csv", "manifest.json",
                     "convergence.json"):
            assert os.path.exists(os.path.join(out, name))

    def test_micro_hard_profile_is_symmetric(self, make_config):
        cfg = make_config(**SMALL_LAYER)
        profile = _profile(run_case(cfg))
        x2 = profile.column("x2")
        np.testing.assert_allclose(x2, cfg.geometry.H - x2[::-1], atol=1e-12)
        for name in ("gamma_1", "gamma_2"):
            gamma = profile.column(name)
            np.testing.assert_allclose(gamma, gamma[::-1], rtol=1e-6, atol=1e-6 * np.abs(gamma).max())
            assert gamma[0] == 0.0
            assert np.abs(gamma[len(gamma) // 2]) > 0.0

    def test_micro_hard_is_stronger(self, make_config):
        hard = run_case(make_config(**SMALL_LAYER))
        free = run_case(make_config(**{**SMALL_LAYER, "geometry": {"ny": 4, "micro_bc": "free"}}))
        assert _curve(hard)[1][-1] > _curve(free)[1][-1]

    def test_proposed_without_recovery_matches_energetic_model(self, make_config):
        common = dict(SMALL_LAYER, material={"zeta": 0.0})
        proposed = run_case(make_config(**common))
        energetic = run_case(make_config(**common, model={"kind": "gurtin-energetic"}))
        expected = _curve(energetic)[1]
        np.testing.assert_allclose(_curve(proposed)[1], expected,
                                   rtol=1e-8, atol=1e-8 * np.abs(expected).max())
        gamma = _profile(energetic).column("gamma_1")
        np.testing.assert_allclose(_profile(proposed).column("gamma_1"), gamma,
                                   rtol=1e-8, atol=1e-8 * np.abs(gamma).max())

    def test_recovery_saturates_hardening(self, make_config):
        runs = {zeta: run_case(make_config(**ZETA_LAYER, material={"zeta": zeta}))
                for zeta in (0.0, 500.0, 2000.0)}

        load, stress = _curve(runs[0.0])
        plastic = load >= 0.01
        assert plastic.sum() > 10
        assert _r_squared(load[plastic], stress[plastic]) > 0.999

        linear = _final_tangent(runs[0.0])
        assert linear > 0.0
        assert abs(_final_tangent(runs[2000.0])) < 0.02 * linear

        finals = [_curve(runs[z])[1][-1] for z in (0.0, 500.0, 2000.0)]
        assert finals[0] > finals[1] > finals[2]

    @pytest.mark.parametrize("zeta", [0.0, 2000.0])
    def test_midlayer_gradient_vanishes(self, make_config, zeta):
        profile = _profile(run_case(make_config(**ZETA_LAYER, material={"zeta": zeta})))
        gp = profile.column("gamma_p12")
        grad = profile.column("dgamma_p12_dx2")
        mid = len(gp) // 2
        assert profile.column("x2")[mid] == pytest.approx(0.5)
        np.testing.assert_allclose(gp, gp[::-1], rtol=1e-6, atol=1e-6 * np.abs(gp).max())
        assert np.abs(grad).max() > 0.0
        assert abs(grad[mid]) <= 1e-6 * np.abs(grad).max()

    def test_cyclic_reverses_at_kinks(self, make_config):
        cfg = make_config(geometry={"ny": 4},
                          loading={"kind": "cyclic", "amplitude": 0.002, "period": 0.8, "cycles": 1})
        stress = run_case(cfg).get("stress_strain")
        peak = _row_at(stress, 0.2)
        trough = _row_at(stress, 0.6)
        assert stress.column("Gamma")[peak] == pytest.approx(0.002)
        assert stress.column("Gamma")[trough] == pytest.approx(-0.002)
        assert stress.column("sigma12_avg")[peak] > 0.0
        assert stress.column("sigma12_avg")[trough] < 0.0
        assert stress.column("time")[-1] == pytest.approx(0.8)

    @pytest.mark.parametrize("zeta", [0.0, 500.0])
    def test_cyclic_unloading_keeps_energy_and_curvature(self, make_config, zeta):
        cfg = make_config(geometry={"ny": 10}, material={"zeta": zeta},
                          loading={"kind": "cyclic", "amplitude": 0.005, "period": 2.0, "cycles": 1})
        outputs = run_case(cfg)
        stress = outputs.get("stress_strain")
        psi = outputs.get("averages").column("Psi_rho_bar")
        load, sigma = _curve(outputs)
        peak, trough = _row_at(stress, 0.5), _row_at(stress, 1.5)

        slopes = np.diff(sigma[peak:trough + 1]) / np.diff(load[peak:trough + 1])
        elastic = np.flatnonzero(slopes >= 0.95 * MU_TABLE1)
        assert len(elastic) >= 3
        if zeta == 0.0:
            drift = np.abs(psi[peak + elastic + 1] - psi[peak + elastic])
            assert drift.max() <= 0.02 * np.abs(psi).max()

        # reverse branch from the stiffest step on: the tangent only softens
        reverse = slopes[int(np.argmax(slopes)):]
        assert np.all(np.diff(reverse) <= 0.01 * MU_TABLE1)
        assert reverse[-1] < 0.5 * MU_TABLE1

    def test_nonproportional_holds_boundary_slip(self, make_config):
        cfg = make_config(geometry={"ny": 8}, loading={"kind": "nonproportional"},
                          solver={"dt_initial": 0.05}, output={"profile_loads": [0.01, 0.02]})
        assert cfg.geometry.micro_bc == "free"
        outputs = run_case(cfg)
        at_switch, final = _profile(outputs, 0), _profile(outputs, 1)
        for name in ("gamma_1", "gamma_2"):
            before, after = at_switch.column(name), final.column(name)
            assert after[0] == before[0]
            assert after[-1] == before[-1]
            mid = len(after) // 2
            assert abs(after[mid] - before[mid]) > 0.0
        assert [p["load"] for p in outputs.profiles] == pytest.approx([0.01, 0.02])

        i = _row_at(outputs.get("stress_strain"), 1.0)
        lam, sigma = _curve(outputs)
        assert sigma[i + 1] - sigma[i] <= 1.01 * MU_TABLE1 * (lam[i + 1] - lam[i])

    def test_dissipative_baseline_stiffens_at_switch(self, make_config):
        common = dict(geometry={"ny": 10}, loading={"kind": "nonproportional"}, solver={"dt_initial": 0.05})
        proposed = run_case(make_config(**common))
        baseline_cfg = make_config(**common, model={"kind": "gurtin-dissipative"})
        assert baseline_cfg.model.L_d_ratio == pytest.approx(0.2)
        baseline = run_case(baseline_cfg)

        ours = post.switch_response(proposed.get("stress_strain"), 1.0, MU_TABLE1)
        theirs = post.switch_response(baseline.get("stress_strain"), 1.0, MU_TABLE1)
        assert ours["elastic_ratio"] <= 1.01
        assert ours["elastic_ratio"] < 0.2
        assert 0.25 < theirs["elastic_ratio"] <= 1.01
        assert theirs["elastic_ratio"] > 4.0 * ours["elastic_ratio"]

    def test_reruns_write_identical_series(self, make_config, tmp_path):
        cfg = make_config(**SMALL_LAYER)
        first, second = str(tmp_path / "first"), str(tmp_path / "second")
        run_case(cfg, first)
        run_case(cfg, second)
        names = sorted(n for n in os.listdir(first) if n.endswith(".csv"))
        assert "stress_strain.csv" in names
        match, mismatch, errors = filecmp.cmpfiles(first, second, names, shallow=False)
        assert match == names
        assert mismatch == [] and errors == []


class TestBicrystals:
    def test_free_boundary_has_no_gnds(self, make_config):
        cfg = make_config(case={"kind": "bicrystal_shear"}, geometry={"nx": 8},
                          loading={"max_strain": 0.002}, solver={"dt_initial": 0.1})
        assert cfg.grain_boundary.c_s == 0.0
        profile = _profile(run_case(cfg))
        gamma, rho = profile.column("gamma_1"), profile.column("rho_1")
        assert np.abs(gamma).max() > 0.0
        assert np.abs(rho).max() <= 1e-6 * np.abs(gamma).max() / cfg.geometry.H

    def test_boundary_slip_falls_with_hardening(self, make_config):
        runs = [run_case(make_config(**BICRYSTAL, grain_boundary={"c_s": c_s}))
                for c_s in (0.0, 1e4, 1e12)]
        slips = [_gb_slip(r) for r in runs]
        assert slips[0] > slips[1] > slips[2]
        assert slips[2] <= 1e-6 * slips[0]

        hard = _profile(run_case(make_config(**BICRYSTAL, grain_boundary={"mode": "micro-hard"})))
        expected = hard.column("gamma_1")
        np.testing.assert_allclose(_profile(runs[2]).column("gamma_1"), expected,
                                   rtol=0.0, atol=1e-3 * np.abs(expected).max())

    def test_boundary_recovery_dissipates(self, make_config):
        runs = {z: run_case(make_config(**BICRYSTAL, grain_boundary={"c_s": 5e4, "zeta_s": z}))
                for z in (0.0, 500.0, 2000.0)}
        d_gb = {z: r.get("averages").column("D_gb") for z, r in runs.items()}
        assert np.all(d_gb[0.0] == 0.0)
        assert np.all(d_gb[500.0] >= 0.0)
        assert d_gb[500.0][-1] > 0.0
        assert d_gb[2000.0][-1] > d_gb[500.0][-1]

        peaks = [np.abs(_profile(runs[z]).column("rho_1")).max() for z in (0.0, 500.0, 2000.0)]
        assert peaks[0] > peaks[1] > peaks[2]

    def test_tension_transmits_in_plane_system(self, make_config):
        cfg = make_config(case={"kind": "bicrystal_tension"}, geometry={"nx": 6, "ny": 4},
                          loading={"max_strain": 0.001}, solver={"dt_initial": 0.25})
        case = CASES["bicrystal_tension"](cfg)
        assert case.transmitted_systems().tolist() == [1]
        mesh = case.mesh
        assert len(mesh.interfaces) > 0
        described = set(case.constraints.describe())
        for copy, original in mesh.copies:
            assert f"tie {mesh.dof(copy, 3)} {mesh.dof(original, 3)} 0 0" in described
            assert f"tie {mesh.dof(copy, 2)} {mesh.dof(original, 2)} 0 0" not in described

        outputs = run_case(cfg)
        fields = outputs.get("fields")
        assert fields is not None
        gamma_2 = fields.column("gamma_2")
        np.testing.assert_array_equal(gamma_2[mesh.copies[:, 0]], gamma_2[mesh.copies[:, 1]])
        stress = outputs.get("stress_strain")
        assert stress.headers == ["step", "time", "eps11", "sigma11_avg"]
        assert outputs.get("averages").headers[2] == "eps11"
        assert stress.column("sigma11_avg")[-1] > 0.0

    def test_tension_jump_falls_with_hardening(self, make_config):
        jumps = []
        for c_s in (0.0, 1e4, 1e12):
            cfg = make_config(case={"kind": "bicrystal_tension"}, geometry={"nx": 6, "ny": 4},
                              loading={"max_strain": 0.01}, solver={"dt_initial": 0.5},
                              grain_boundary={"c_s": c_s})
            case = CASES[cfg.kind](cfg)
            jump = post.interface_jumps(case.mesh, case.run().march.d_full)
            np.testing.assert_array_equal(jump[:, 1], 0.0)
            jumps.append(np.abs(jump[:, 0]).max())
        assert jumps[0] > jumps[1] > jumps[2]
