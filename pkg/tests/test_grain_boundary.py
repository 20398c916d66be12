"""Grain-boundary kernel: orientation, Burgers vector, energetic GB stress and its tangent."""

import numpy as np
import pytest

from gradplast.core.errorhandler import ErrorCode, GrainBoundaryError
from gradplast.material.grain_boundary import (
    GbMaterialParams, GbState, audit_gb_dissipation, build_gb_orientation, gb_burgers_increment,
    gb_defect_energy, gb_stress_tangent, gb_traction, gb_tractions, update_gb_stress
)
from gradplast.material.kinematics import SlipSet, build_slip_systems

NORMAL = np.array([1.0, 0.0])


def _full_orientation(s, m, n):
    """3x3 tensor s ⊗ (m x n) with the in-plane vectors embedded in 3D."""
    s3, m3, n3 = (np.append(v, 0.0) for v in (s, m, n))
    return np.outer(s3, np.cross(m3, n3))


@pytest.fixture
def bicrystal():
    slips_A = SlipSet(build_slip_systems([10.0, 70.0]))
    slips_B = SlipSet(build_slip_systems([-10.0, 50.0]))
    normal = np.array([np.cos(0.3), np.sin(0.3)])
    return slips_A, slips_B, build_gb_orientation(slips_A, slips_B, normal)


class TestOrientation:
    def test_out_of_plane_factor(self):
        slips = SlipSet(build_slip_systems([10.0]))
        orient = build_gb_orientation(slips, slips, NORMAL)
        np.testing.assert_allclose(orient.c, -np.cos(np.deg2rad(10.0)))

    def test_slip_plane_in_boundary(self):
        slips = SlipSet(build_slip_systems([0.0]))
        orient = build_gb_orientation(slips, slips, np.array([0.0, 1.0]))
        np.testing.assert_allclose(orient.c, 0.0, atol=1e-16)

    def test_interaction_moduli_match_full_tensors(self, bicrystal):
        slips_A, slips_B, orient = bicrystal
        sets = [slips_A, slips_B]
        C = orient.interaction_moduli()
        for I in range(2):
            for a in range(2):
                N_Ia = _full_orientation(sets[I].s[a], sets[I].m[a], orient.n_s)
                for J in range(2):
                    for b in range(2):
                        N_Jb = _full_orientation(sets[J].s[b], sets[J].m[b], orient.n_s)
                        assert C[I, a, J, b] == pytest.approx(np.sum(N_Ia * N_Jb), abs=1e-14)

    def test_tractions_match_full_tensors(self, bicrystal, rng):
        slips_A, _, orient = bicrystal
        M = rng.normal(size=2)
        M_full = np.zeros((3, 3))
        M_full[:2, 2] = M
        for a in range(2):
            N = _full_orientation(slips_A.s[a], slips_A.m[a], orient.n_s)
            assert gb_traction(orient, M, "A", a) == pytest.approx(np.sum(M_full * N))
        np.testing.assert_allclose(gb_tractions(orient, M)[0],
                                   [gb_traction(orient, M, "A", a) for a in range(2)])

    def test_non_unit_normal(self):
        slips = SlipSet(build_slip_systems([10.0]))
        with pytest.raises(GrainBoundaryError) as exc:
            build_gb_orientation(slips, slips, np.array([1.0, 1.0]))
        assert exc.value.error_code == ErrorCode.GB_INVALID_PARAMETER

    def test_slip_count_mismatch(self):
        with pytest.raises(GrainBoundaryError):
            build_gb_orientation(SlipSet(build_slip_systems([10.0])),
                                 SlipSet(build_slip_systems([10.0, 20.0])), NORMAL)


class TestBurgersIncrement:
    def test_identical_grains_equal_slip(self):
        slips = SlipSet(build_slip_systems([10.0, 70.0]))
        orient = build_gb_orientation(slips, slips, NORMAL)
        dg = np.array([1e-3, -4e-4])
        np.testing.assert_allclose(gb_burgers_increment(orient, dg, dg), 0.0, atol=1e-18)

    def test_single_sided_slip(self, bicrystal):
        _, slips_B, orient = bicrystal
        dG = gb_burgers_increment(orient, np.zeros(2), np.array([2e-3, 0.0]))
        np.testing.assert_allclose(dG, 2e-3 * orient.c[1, 0] * slips_B.s[0])


class TestGbStress:
    def test_first_step(self):
        p = GbMaterialParams(c_s=5e4, zeta_s=0.0)
        new, D = update_gb_stress(GbState.virgin(1), np.array([[1e-4, 0.0]]), p)
        np.testing.assert_allclose(new.M, [[5.0, 0.0]])
        np.testing.assert_array_equal(D, 0.0)
        assert new.G_cum[0] == pytest.approx(1e-4)

    def test_saturation(self):
        p = GbMaterialParams(c_s=5e4, zeta_s=1000.0)
        state = GbState.virgin(1)
        for _ in range(200):
            state, _ = update_gb_stress(state, np.array([[1e-3, 0.0]]), p)
        np.testing.assert_allclose(state.M, [[p.c_s / p.zeta_s, 0.0]], rtol=1e-12)

    def test_bounded_and_dissipative(self, rng):
        p = GbMaterialParams(c_s=5e4, zeta_s=500.0)
        state = GbState.virgin(4)
        for _ in range(100):
            state, D = update_gb_stress(state, rng.normal(scale=1e-3, size=(4, 2)), p)
            assert np.all(D >= 0.0)
            assert np.all(np.linalg.norm(state.M, axis=-1) <= p.c_s / p.zeta_s * (1.0 + 1e-12))
        assert np.all(gb_defect_energy(state, p) <= p.c_s / (2.0 * p.zeta_s ** 2) * (1.0 + 1e-12))

    def test_recovery_needs_hardening(self):
        with pytest.raises(GrainBoundaryError) as exc:
            update_gb_stress(GbState.virgin(1), np.zeros((1, 2)), GbMaterialParams(c_s=0.0, zeta_s=1.0))
        assert exc.value.error_code == ErrorCode.GB_INVALID_PARAMETER

    def test_micro_free_energy(self):
        state = GbState.virgin(3)
        np.testing.assert_array_equal(gb_defect_energy(state, GbMaterialParams()), 0.0)

    def test_energy_value(self):
        state = GbState(M=np.array([[3.0, 4.0]]), G_cum=np.zeros(1), D_acc=np.zeros(1))
        assert gb_defect_energy(state, GbMaterialParams(c_s=10.0))[0] == pytest.approx(1.25)

    def test_negative_dissipation(self):
        with pytest.raises(GrainBoundaryError) as exc:
            audit_gb_dissipation(np.array([0.0, -1.0]))
        assert exc.value.error_code == ErrorCode.GB_NEGATIVE_DISSIPATION

    @pytest.mark.parametrize("zeta_s", [0.0, 800.0])
    def test_tangent(self, bicrystal, rng, fd, check_tangent, zeta_s):
        _, _, orient = bicrystal
        p = GbMaterialParams(c_s=5e4, zeta_s=zeta_s)
        state = GbState(M=rng.normal(scale=5.0, size=(1, 2)), G_cum=np.zeros(1), D_acc=np.zeros(1))
        dgamma = rng.normal(scale=1e-3, size=(2, 2))

        def stress(x):
            dG = gb_burgers_increment(orient, x[0][None], x[1][None])
            return update_gb_stress(state, dG, p)[0].M[0]

        dG = gb_burgers_increment(orient, dgamma[0][None], dgamma[1][None])
        M_new = update_gb_stress(state, dG, p)[0].M
        T = gb_stress_tangent(M_new, orient, dG, p)[0]
        numeric = fd(stress, dgamma)
        check_tangent(np.moveaxis(T, -1, 0), numeric)
