"""
Mixed Q8 bulk elements and zero-thickness interface elements.

Both element types are evaluated group-wise: all elements of one grain (or all
interface elements) share slip systems and material data, so the Gauss point
loops collapse into ``einsum`` contractions over (element, gauss point) axes.

Element unknowns are ordered as in :meth:`MixedMesh.element_dofs`: 16
displacements (node, component) followed by 8k slips (node, system).
Interface unknowns are the 6k slips ordered (side, node, system).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core.errorhandler import ErrorCode, MeshError
from ..material.bulk import BulkMaterialParams, BulkResponse, BulkState, update_bulk
from ..material.grain_boundary import (
    SIDE_SIGN, GbMaterialParams, GbOrientation, GbState, gb_burgers_increment, gb_stress_tangent,
    gb_tractions, update_gb_stress
)
from ..material.kinematics import SlipSet
from .shape import gauss_3x3, gauss_legendre, line3_shape, q8_shape


@dataclass
class ElementMatrices:
    """Internal force vectors (E, n) and stiffness matrices (E, n, n) of a group."""
    f_int: np.ndarray
    K: np.ndarray


@dataclass
class BulkResult:
    matrices: ElementMatrices
    response: BulkResponse
    sigma: np.ndarray
    sigma33: np.ndarray
    gamma: np.ndarray
    kappa: np.ndarray

    @property
    def state(self) -> BulkState:
        return self.response.state


@dataclass
class InterfaceResult:
    matrices: ElementMatrices
    state: GbState
    D_inc: np.ndarray


class BulkElementGroup:
    """
    Q8 elements of one grain with 3x3 Gauss integration.

    Args:
        coords: (E, 8, 2) nodal coordinates
        slips: Slip systems of the grain
        params: Bulk material parameters

    Raises:
        MeshError: Non-positive Jacobian determinant at a Gauss point
    """

    def __init__(self, coords: np.ndarray, slips: SlipSet, params: BulkMaterialParams):
        self.coords = np.asarray(coords, dtype=float)
        self.slips = slips
        self.params = params
        self.k = slips.k

        points, weights = gauss_3x3()
        self.N, dN_nat = q8_shape(points[:, 0], points[:, 1])
        J = np.einsum('eai,gaj->egij', self.coords, dN_nat)
        detJ = np.linalg.det(J)
        if np.any(detJ <= 0.0):
            bad = int(np.flatnonzero((detJ <= 0.0).any(axis=1))[0])
            raise MeshError(
                ErrorCode.MESH_NEGATIVE_JACOBIAN,
                f"Non-positive Jacobian determinant in element {bad} of the group"
            )
        invJ = np.linalg.inv(J)
        self.dN = np.einsum('gaj,egji->egai', dN_nat, invJ)
        self.wdet = weights * detJ

        E, G = detJ.shape
        B = np.zeros((E, G, 3, 16))
        B[..., 0, 0::2] = self.dN[..., 0]
        B[..., 1, 1::2] = self.dN[..., 1]
        B[..., 2, 0::2] = self.dN[..., 1]
        B[..., 2, 1::2] = self.dN[..., 0]
        self.B = B

        C = params.elastic.C
        t = slips.t
        self.C = C
        self.CT = t @ C
        self.tCt = t @ C @ t.T

    @property
    def n_elements(self) -> int:
        return len(self.coords)

    @property
    def n_gauss(self) -> int:
        return self.wdet.shape[1]

    def virgin_state(self) -> BulkState:
        return BulkState.virgin((self.n_elements, self.n_gauss), self.k, self.params.S0)

    def interpolate(self, nodal: np.ndarray) -> np.ndarray:
        """Nodal slip values (E, 8, k) at the Gauss points, shape (E, G, k)."""
        return np.einsum('ga,eak->egk', self.N, nodal)

    def gradient(self, nodal: np.ndarray) -> np.ndarray:
        """Slip gradients (E, G, k, 2) from nodal values (E, 8, k)."""
        return np.einsum('egai,eak->egki', self.dN, nodal)

    def strain(self, u: np.ndarray) -> np.ndarray:
        return np.einsum('egcp,ep->egc', self.B, u)

    def evaluate(self, u, gamma, dgamma, state: BulkState, dt: float) -> BulkResult:
        """
        Internal forces and consistent tangents of every element in the group.

        Args:
            u: (E, 16) nodal displacements at the end of the step
            gamma: (E, 8, k) total nodal slips at the end of the step
            dgamma: (E, 8, k) nodal slip increments of the step
            state: Committed Gauss point history, batch shape (E, G)
            dt: Step size
        """
        E, k = self.n_elements, self.k
        p = self.params
        t = self.slips.t

        gamma_g = self.interpolate(gamma)
        dgamma_g = self.interpolate(dgamma)
        kappa = self.gradient(gamma)
        dkappa = self.gradient(dgamma)

        eps = self.strain(u)
        eps_e = eps - gamma_g @ t
        sigma = eps_e @ self.C.T
        tau = sigma @ t.T

        resp = update_bulk(state, dgamma_g, kappa, dkappa, self.slips, p, dt)

        f_u = np.einsum('eg,egcp,egc->ep', self.wdet, self.B, sigma)
        f_g = np.einsum('eg,ga,egk->eak', self.wdet, self.N, resp.pi - tau) \
            + np.einsum('eg,egaq,egkq->eak', self.wdet, self.dN, resp.xi)

        opt = dict(optimize=True)
        K_uu = np.einsum('eg,egcp,cd,egdr->epr', self.wdet, self.B, self.C, self.B, **opt)
        K_ug = -np.einsum('eg,egcp,kc,gb->epbk', self.wdet, self.B, self.CT, self.N, **opt)
        K_ug = K_ug.reshape(E, 16, 8 * k)
        K_gg = np.einsum('eg,ga,gb,kl->eakbl', self.wdet, self.N, self.N, self.tCt, **opt)
        K_gg += np.einsum('eg,ga,egkl,gb->eakbl', self.wdet, self.N, resp.dpi_dgamma, self.N, **opt)
        K_gg += np.einsum('eg,ga,egklr,egbr->eakbl', self.wdet, self.N, resp.dpi_dkappa, self.dN, **opt)
        K_gg += np.einsum('eg,egaq,egkql,gb->eakbl', self.wdet, self.dN, resp.dxi_dgamma, self.N, **opt)
        K_gg += np.einsum('eg,egaq,egkqlr,egbr->eakbl', self.wdet, self.dN, resp.dxi_dkappa,
                          self.dN, **opt)
        K_gg = K_gg.reshape(E, 8 * k, 8 * k)

        n = 16 + 8 * k
        K = np.empty((E, n, n))
        K[:, :16, :16] = K_uu
        K[:, :16, 16:] = K_ug
        K[:, 16:, :16] = np.transpose(K_ug, (0, 2, 1))
        K[:, 16:, 16:] = K_gg
        f = np.concatenate([f_u, f_g.reshape(E, 8 * k)], axis=1)

        return BulkResult(
            matrices=ElementMatrices(f_int=f, K=K),
            response=resp,
            sigma=sigma,
            sigma33=p.elastic.out_of_plane_stress(eps_e),
            gamma=gamma_g,
            kappa=kappa,
        )


def bulk_element(coords, u, gamma, dgamma, state: BulkState, slips: SlipSet,
                 params: BulkMaterialParams, dt: float):
    """
    Single-element form of :class:`BulkElementGroup`.

    Args:
        coords: (8, 2) nodal coordinates
        u: (16,) nodal displacements
        gamma, dgamma: (8, k) total nodal slips and their increments
        state: History at the 9 Gauss points, batch shape (9,)

    Returns:
        tuple: (ElementMatrices, new BulkState)
    """
    group = BulkElementGroup(np.asarray(coords)[None], slips, params)
    batched = BulkState(**{name: value[None] for name, value in vars(state).items()})
    res = group.evaluate(np.asarray(u)[None], np.asarray(gamma)[None], np.asarray(dgamma)[None],
                         batched, dt)
    new = BulkState(**{name: value[0] for name, value in vars(res.state).items()})
    return ElementMatrices(f_int=res.matrices.f_int[0], K=res.matrices.K[0]), new


class InterfaceElementGroup:
    """
    Six-node zero-thickness elements on grain boundaries, 3-point Gauss rule.

    Args:
        coords: (I, 3, 2) coordinates of the A-side nodes (end, middle, end)
        orient: Orientation with leading axis I
        params: GB material parameters
        measure: (I,) factor applied to the segment length
    """

    def __init__(self, coords: np.ndarray, orient: GbOrientation, params: GbMaterialParams,
                 measure: Optional[np.ndarray] = None):
        self.coords = np.asarray(coords, dtype=float)
        self.orient = orient
        self.params = params
        self.k = orient.k

        points, weights = gauss_legendre(3)
        self.N, dN = line3_shape(points)
        tangent = np.einsum('ga,iax->igx', dN, self.coords)
        jac = np.linalg.norm(tangent, axis=-1)
        if np.any(jac <= 0.0):
            raise MeshError(ErrorCode.MESH_DEGENERATE_GEOMETRY, "Interface element of zero length")
        if measure is not None:
            jac = jac * np.asarray(measure, dtype=float)[:, None]
        self.wj = weights * jac
        # orientation broadcast over the Gauss axis
        self.orient_g = GbOrientation(n_s=orient.n_s[:, None], s=orient.s[:, None],
                                      c=orient.c[:, None])

    @property
    def n_elements(self) -> int:
        return len(self.coords)

    @property
    def n_gauss(self) -> int:
        return self.wj.shape[1]

    @property
    def length(self) -> float:
        return float(self.wj.sum())

    def virgin_state(self) -> GbState:
        return GbState.virgin((self.n_elements, self.n_gauss))

    def burgers_increment(self, dgamma: np.ndarray) -> np.ndarray:
        """GB Burgers vector increments (I, G, 2) from slip increments (I, 2, 3, k)."""
        dg = np.einsum('gn,isnk->igsk', self.N, dgamma)
        return gb_burgers_increment(self.orient_g, dg[:, :, 0], dg[:, :, 1])

    def evaluate(self, dgamma, state: GbState) -> InterfaceResult:
        """
        Args:
            dgamma: (I, 2, 3, k) slip increments ordered (side, node, system)
            state: Committed GB history, batch shape (I, G)
        """
        I, k = self.n_elements, self.k
        p = self.params
        dG = self.burgers_increment(dgamma)
        new, D_inc = update_gb_stress(state, dG, p)
        V = self.orient.V
        T = gb_stress_tangent(new.M, self.orient_g, dG, p)
        # side A enters the Burgers vector with a minus sign
        tractions = SIDE_SIGN[:, None] * gb_tractions(self.orient_g, new.M)

        f = np.einsum('ig,gn,igsa->isna', self.wj, self.N, tractions)
        K = np.einsum('ig,gn,isaq,gm,igtbq->isnatmb', self.wj, self.N, V, self.N, T, optimize=True)
        n = 6 * k
        return InterfaceResult(
            matrices=ElementMatrices(f_int=f.reshape(I, n), K=K.reshape(I, n, n)),
            state=new,
            D_inc=D_inc,
        )
