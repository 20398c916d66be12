"""Mixed Q8 bulk element and zero-thickness interface element."""

from dataclasses import replace

import numpy as np
import pytest

from gradplast.core.errorhandler import ErrorCode, MeshError
from gradplast.fem.assembly import stack_orientations
from gradplast.fem.elements import BulkElementGroup, InterfaceElementGroup, bulk_element
from gradplast.fem.shape import gauss_3x3, q8_shape
from gradplast.material.bulk import BulkState
from gradplast.material.grain_boundary import GbMaterialParams, GbState, build_gb_orientation, gb_traction
from gradplast.material.kinematics import ElasticLaw, SlipSet, build_slip_systems

DT = 0.1
CORNERS = np.array([[0.0, 0.0], [1.2, 0.1], [1.1, 1.0], [-0.1, 0.9]])


def _q8_coords(corners):
    mids = 0.5 * (corners + np.roll(corners, -1, axis=0))
    return np.vstack([corners, mids])


def _elastic_forces(coords, u, C, t):
    """Reference Gauss loop: displacement forces, slip forces at zero slip and K_uu."""
    points, weights = gauss_3x3()
    f_u = np.zeros(16)
    f_g = np.zeros((8, len(t)))
    K = np.zeros((16, 16))
    for (xi, eta), w in zip(points, weights):
        N, dN_nat = q8_shape(xi, eta)
        J = coords.T @ dN_nat
        dN = dN_nat @ np.linalg.inv(J)
        B = np.zeros((3, 16))
        B[0, 0::2] = dN[:, 0]
        B[1, 1::2] = dN[:, 1]
        B[2, 0::2] = dN[:, 1]
        B[2, 1::2] = dN[:, 0]
        wd = w * np.linalg.det(J)
        sigma = C @ (B @ u)
        f_u += wd * B.T @ sigma
        f_g -= wd * np.outer(N, t @ sigma)
        K += wd * B.T @ C @ B
    return f_u, f_g, K


class TestBulkElement:
    def test_elastic_response(self, table1_params, double_slip, rng):
        coords = _q8_coords(CORNERS)
        u = rng.normal(scale=1e-3, size=16)
        state = BulkState.virgin((9,), 2, table1_params.S0)
        zeros = np.zeros((8, 2))
        mats, _ = bulk_element(coords, u, zeros, zeros, state, double_slip, table1_params, DT)
        f_u, f_g, K_uu = _elastic_forces(coords, u, table1_params.elastic.C, double_slip.t)
        np.testing.assert_allclose(mats.f_int[:16], f_u, rtol=1e-10, atol=1e-8)
        np.testing.assert_allclose(mats.f_int[16:], f_g.ravel(), rtol=1e-10, atol=1e-8)
        np.testing.assert_allclose(mats.K[:16, :16], K_uu, rtol=1e-10)

    def test_virgin_state_has_no_forces(self, table1_params, double_slip):
        coords = _q8_coords(CORNERS)
        state = BulkState.virgin((9,), 2, table1_params.S0)
        zeros = np.zeros((8, 2))
        mats, new = bulk_element(coords, np.zeros(16), zeros, zeros, state, double_slip,
                                 table1_params, DT)
        np.testing.assert_array_equal(mats.f_int, 0.0)
        np.testing.assert_array_equal(new.D_acc, 0.0)

    def test_rigid_translation(self, table1_params, double_slip):
        coords = _q8_coords(CORNERS)
        state = BulkState.virgin((9,), 2, table1_params.S0)
        zeros = np.zeros((8, 2))
        u = np.tile([0.3, -0.2], 8)
        mats, _ = bulk_element(coords, u, zeros, zeros, state, double_slip, table1_params, DT)
        np.testing.assert_allclose(mats.f_int, 0.0, atol=1e-9)

    @pytest.mark.parametrize("model, E", [
        ("proposed", 260000.0),
        ("proposed", 200.0),
        ("gurtin-energetic", 200.0),
        ("gurtin-dissipative", 200.0),
    ])
    def test_stiffness_is_consistent(self, table1_params, double_slip, rng, fd, check_tangent,
                                     model, E):
        p = replace(table1_params, elastic=ElasticLaw(E, 0.3), model=model, L_en=0.8, L_d=0.4)
        coords = _q8_coords(CORNERS)
        state = BulkState.virgin((9,), 2, p.S0)
        if model == "proposed":
            state.xi = rng.normal(scale=0.05, size=(9, 2, 2))
        gamma_old = rng.normal(scale=1e-3, size=(8, 2))
        dgamma = 1e-3 * (1.0 + 0.1 * rng.uniform(size=(8, 2))) * np.array([1.0, -1.0])
        d = np.concatenate([rng.normal(scale=1e-3, size=16), (gamma_old + dgamma).ravel()])

        def forces(x):
            gamma = x[16:].reshape(8, 2)
            mats, _ = bulk_element(coords, x[:16], gamma, gamma - gamma_old, state, double_slip, p, DT)
            return mats.f_int

        mats, _ = bulk_element(coords, d[:16], (gamma_old + dgamma), dgamma, state, double_slip, p, DT)
        numeric = fd(forces, d)
        for rows in (slice(0, 16), slice(16, None)):
            for cols in (slice(0, 16), slice(16, None)):
                check_tangent(mats.K[rows, cols], numeric[rows, cols])

    def test_negative_jacobian(self, table1_params, single_slip):
        coords = _q8_coords(CORNERS[::-1])
        with pytest.raises(MeshError) as exc:
            BulkElementGroup(coords[None], single_slip, table1_params)
        assert exc.value.error_code == ErrorCode.MESH_NEGATIVE_JACOBIAN

    def test_group_matches_single_elements(self, table1_params, single_slip, rng):
        coords = np.array([_q8_coords(CORNERS), _q8_coords(CORNERS + [2.0, 0.0])])
        group = BulkElementGroup(coords, single_slip, table1_params)
        u = rng.normal(scale=1e-3, size=(2, 16))
        gamma = rng.normal(scale=1e-3, size=(2, 8, 1))
        res = group.evaluate(u, gamma, gamma, group.virgin_state(), DT)
        for e in range(2):
            mats, _ = bulk_element(coords[e], u[e], gamma[e], gamma[e],
                                   BulkState.virgin((9,), 1, table1_params.S0), single_slip,
                                   table1_params, DT)
            np.testing.assert_allclose(res.matrices.f_int[e], mats.f_int, rtol=1e-12, atol=1e-12)


@pytest.fixture
def interface_setup(rng):
    slips_A = SlipSet(build_slip_systems([10.0, 70.0]))
    slips_B = SlipSet(build_slip_systems([-10.0, 50.0]))
    orient = stack_orientations([build_gb_orientation(slips_A, slips_B, np.array([1.0, 0.0]))])
    coords = np.array([[[0.0, 0.0], [0.0, 0.5], [0.0, 1.0]]])
    state = GbState.virgin((1, 3))
    state.M = rng.normal(scale=5.0, size=(1, 3, 2))
    return coords, orient, state


class TestInterfaceElement:
    @pytest.mark.parametrize("zeta_s", [0.0, 800.0])
    def test_stiffness_is_consistent(self, interface_setup, rng, fd, check_tangent, zeta_s):
        coords, orient, state = interface_setup
        group = InterfaceElementGroup(coords, orient, GbMaterialParams(c_s=5e4, zeta_s=zeta_s))
        x0 = rng.normal(scale=1e-3, size=12)
        res = group.evaluate(x0.reshape(1, 2, 3, 2), state)
        numeric = fd(lambda x: group.evaluate(x.reshape(1, 2, 3, 2), state).matrices.f_int[0], x0)
        check_tangent(res.matrices.K[0], numeric)
        assert np.all(res.D_inc >= 0.0)

    def test_length(self, interface_setup):
        coords, orient, _ = interface_setup
        group = InterfaceElementGroup(coords, orient, GbMaterialParams(c_s=5e4))
        assert group.length == pytest.approx(1.0)
        projected = InterfaceElementGroup(coords, orient, GbMaterialParams(c_s=5e4), measure=np.array([0.5]))
        assert projected.length == pytest.approx(0.5)

    def test_no_increment_keeps_stress(self, interface_setup):
        coords, orient, state = interface_setup
        group = InterfaceElementGroup(coords, orient, GbMaterialParams(c_s=5e4, zeta_s=800.0))
        res = group.evaluate(np.zeros((1, 2, 3, 2)), state)
        np.testing.assert_allclose(res.state.M, state.M)
        np.testing.assert_array_equal(res.D_inc, 0.0)

    def test_identical_grains_cancel(self, rng):
        slips = SlipSet(build_slip_systems([10.0, 70.0]))
        orient = stack_orientations([build_gb_orientation(slips, slips, np.array([1.0, 0.0]))])
        coords = np.array([[[0.0, 0.0], [0.0, 0.5], [0.0, 1.0]]])
        group = InterfaceElementGroup(coords, orient, GbMaterialParams(c_s=5e4, zeta_s=800.0))
        side = rng.normal(scale=1e-3, size=(1, 1, 3, 2))
        res = group.evaluate(np.concatenate([side, side], axis=1), group.virgin_state())
        np.testing.assert_allclose(res.state.M, 0.0, atol=1e-12)
        np.testing.assert_allclose(res.matrices.f_int, 0.0, atol=1e-12)

    def test_linear_boundary_stiffness_is_constant(self, interface_setup, rng):
        coords, orient, state = interface_setup
        group = InterfaceElementGroup(coords, orient, GbMaterialParams(c_s=5e4))
        K1 = group.evaluate(rng.normal(size=(1, 2, 3, 2)), state).matrices.K
        K2 = group.evaluate(rng.normal(size=(1, 2, 3, 2)), group.virgin_state()).matrices.K
        np.testing.assert_allclose(K1, K2)
        np.testing.assert_allclose(K1[0], K1[0].T, rtol=1e-12, atol=1e-6)

    def test_forces_follow_boundary_tractions(self, interface_setup):
        coords, orient, state = interface_setup
        group = InterfaceElementGroup(coords, orient, GbMaterialParams(c_s=5e4, zeta_s=800.0))
        res = group.evaluate(np.zeros((1, 2, 3, 2)), state)
        # line shape functions sum to one, so the nodal sum is the integrated traction
        f = res.matrices.f_int.reshape(1, 2, 3, 2).sum(axis=2)[0]
        for a in range(2):
            on_A = np.sum(group.wj[0] * gb_traction(orient, state.M[0], "A", a))
            on_B = np.sum(group.wj[0] * gb_traction(orient, state.M[0], "B", a))
            assert f[0, a] == pytest.approx(-on_A, rel=1e-12, abs=1e-12)
            assert f[1, a] == pytest.approx(on_B, rel=1e-12, abs=1e-12)
