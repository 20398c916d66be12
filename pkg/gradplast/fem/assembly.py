"""
Global residual and stiffness of the coupled (u, gamma) system.

Bulk element groups (one per grain) and the interface group are evaluated
from the committed history every call; nothing here mutates the committed
state, so a Newton iteration or a rejected step can simply be discarded.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import scipy.sparse as sp

from ..core.errorhandler import ErrorCode, MeshError
from ..core.logger import Logger
from ..material.bulk import BulkMaterialParams, BulkState, audit_dissipation
from ..material.grain_boundary import (
    GbMaterialParams, GbOrientation, GbState, audit_gb_dissipation, build_gb_orientation
)
from ..material.kinematics import SlipSet
from .elements import BulkElementGroup, BulkResult, InterfaceElementGroup, InterfaceResult
from .mesh import GRAIN_A, GRAIN_B, MixedMesh


@dataclass
class SystemState:
    """Committed history: one BulkState per grain group plus the GB history."""
    bulk: List[BulkState]
    gb: Optional[GbState] = None

    def copy(self) -> "SystemState":
        return SystemState(bulk=[s.copy() for s in self.bulk],
                           gb=None if self.gb is None else self.gb.copy())


@dataclass
class Evaluation:
    residual: np.ndarray
    K: sp.csr_matrix
    state: SystemState
    bulk: List[BulkResult] = field(default_factory=list)
    gb: Optional[InterfaceResult] = None


def assemble(n_dofs: int, dofs: List[np.ndarray], forces: List[np.ndarray],
             stiffness: List[np.ndarray]):
    """
    Scatter-add element vectors and matrices.

    Args:
        n_dofs: Size of the global system
        dofs: Per group (E, n) global indices
        forces: Per group (E, n) element vectors
        stiffness: Per group (E, n, n) element matrices

    Returns:
        tuple: (residual, csr matrix)

    Raises:
        MeshError: Index outside the global system
    """
    rows, cols, vals, r_idx, r_val = [], [], [], [], []
    for d, f, K in zip(dofs, forces, stiffness):
        if d.size == 0:
            continue
        if d.min() < 0 or d.max() >= n_dofs:
            raise MeshError(
                ErrorCode.MESH_DOF_OUT_OF_RANGE,
                f"Element dof outside [0, {n_dofs}): min={d.min()}, max={d.max()}"
            )
        n = d.shape[1]
        rows.append(np.repeat(d, n, axis=1).ravel())
        cols.append(np.tile(d, (1, n)).ravel())
        vals.append(K.ravel())
        r_idx.append(d.ravel())
        r_val.append(f.ravel())
    if not r_idx:
        return np.zeros(n_dofs), sp.csr_matrix((n_dofs, n_dofs))
    residual = np.bincount(np.concatenate(r_idx), weights=np.concatenate(r_val), minlength=n_dofs)
    K = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n_dofs, n_dofs)).tocsr()
    return residual, K


def stack_orientations(orients: List[GbOrientation]) -> GbOrientation:
    return GbOrientation(n_s=np.array([o.n_s for o in orients]),
                         s=np.array([o.s for o in orients]),
                         c=np.array([o.c for o in orients]))


class GlobalSystem:
    """
    Element groups of one mesh and their assembly.

    Args:
        mesh: Mesh with grain ids and interface elements
        params: Bulk material parameters
        slips: Slip systems per grain id
        gb_params: GB parameters; no interface elements are evaluated for the
            micro-free and micro-hard modes or for c_s = zeta_s = 0
    """

    def __init__(self, mesh: MixedMesh, params: BulkMaterialParams, slips: Dict[int, SlipSet],
                 gb_params: Optional[GbMaterialParams] = None):
        self.mesh = mesh
        self.params = params
        self.slips = slips
        self.gb_params = gb_params
        self.groups: List[BulkElementGroup] = []
        self.group_elements: List[np.ndarray] = []
        self.group_dofs: List[np.ndarray] = []

        for g in np.unique(mesh.grain):
            elems = np.flatnonzero(mesh.grain == g)
            self.groups.append(BulkElementGroup(mesh.nodes[mesh.elements[elems]], slips[int(g)], params))
            self.group_elements.append(elems)
            self.group_dofs.append(mesh.element_dofs(elems))

        self.interface: Optional[InterfaceElementGroup] = None
        self.interface_dofs = np.zeros((0, 6 * mesh.k), dtype=int)
        ifs = mesh.interfaces
        active = (gb_params is not None and gb_params.mode == "proposed"
                  and (gb_params.c_s > 0.0 or gb_params.zeta_s > 0.0))
        if len(ifs) and active:
            orient = stack_orientations([
                build_gb_orientation(slips[GRAIN_A], slips[GRAIN_B], n) for n in ifs.normal
            ])
            self.interface = InterfaceElementGroup(mesh.nodes[ifs.conn[:, :3]], orient, gb_params,
                                                   measure=ifs.measure)
            self.interface_dofs = mesh.interface_dofs()
        Logger().debug(
            f"Global system: {mesh.n_dofs} dofs, {mesh.n_elements} elements in {len(self.groups)} "
            f"grain groups, {0 if self.interface is None else self.interface.n_elements} interface elements"
        )

    @property
    def n_dofs(self) -> int:
        return self.mesh.n_dofs

    def initial_state(self) -> SystemState:
        return SystemState(bulk=[g.virgin_state() for g in self.groups],
                           gb=None if self.interface is None else self.interface.virgin_state())

    def _split(self, group: BulkElementGroup, dofs: np.ndarray, d: np.ndarray):
        E = group.n_elements
        return d[dofs[:, :16]], d[dofs[:, 16:]].reshape(E, 8, group.k)

    def evaluate(self, d_full: np.ndarray, d_committed: np.ndarray, state: SystemState,
                 dt: float) -> Evaluation:
        """
        Residual and tangent at ``d_full`` for a step that started at ``d_committed``.

        Returns:
            Evaluation: Residual, csr tangent, trial state and element results
        """
        d_full = np.asarray(d_full, dtype=float)
        inc = d_full - d_committed
        results, dofs, forces, stiffness, new_bulk = [], [], [], [], []
        for group, gdofs, gstate in zip(self.groups, self.group_dofs, state.bulk):
            u, gamma = self._split(group, gdofs, d_full)
            _, dgamma = self._split(group, gdofs, inc)
            res = group.evaluate(u, gamma, dgamma, gstate, dt)
            results.append(res)
            new_bulk.append(res.state)
            dofs.append(gdofs)
            forces.append(res.matrices.f_int)
            stiffness.append(res.matrices.K)

        gb_res = None
        if self.interface is not None:
            I, k = self.interface.n_elements, self.mesh.k
            dgamma = inc[self.interface_dofs].reshape(I, 2, 3, k)
            gb_res = self.interface.evaluate(dgamma, state.gb)
            dofs.append(self.interface_dofs)
            forces.append(gb_res.matrices.f_int)
            stiffness.append(gb_res.matrices.K)

        residual, K = assemble(self.n_dofs, dofs, forces, stiffness)
        trial = SystemState(bulk=new_bulk, gb=None if gb_res is None else gb_res.state)
        return Evaluation(residual=residual, K=K, state=trial, bulk=results, gb=gb_res)

    def audit(self, evaluation: Evaluation) -> float:
        """
        Check every dissipation increment of a converged step.

        Returns:
            float: Smallest increment found

        Raises:
            MaterialError: Negative bulk increment
            GrainBoundaryError: Negative GB increment
        """
        scale = self.params.S0
        smallest = np.inf
        for res in evaluation.bulk:
            audit_dissipation(res.response.D_inc, scale)
            smallest = min(smallest, float(np.min(res.response.D_inc)))
        if evaluation.gb is not None:
            audit_gb_dissipation(evaluation.gb.D_inc, scale)
            smallest = min(smallest, float(np.min(evaluation.gb.D_inc)))
        return smallest
