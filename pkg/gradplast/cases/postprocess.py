"""
Post-processing of committed steps: area averages, GB averages, nodal fields.

Gauss point values are projected to the nodes by a diagonal least squares
fit weighted with ``N_a^2``. All weights are positive on serendipity elements
and constant fields are reproduced exactly. Duplicated interface nodes only
see their own grain, so jumps at grain boundaries survive.
"""

from typing import Dict, List

import numpy as np

from ..core.errorhandler import DataError, ErrorCode
from ..fem.assembly import Evaluation, GlobalSystem
from ..material.grain_boundary import gb_defect_energy


def total_area(system: GlobalSystem) -> float:
    return float(sum(g.wdet.sum() for g in system.groups))


def area_average(system: GlobalSystem, values: List[np.ndarray]) -> float:
    """Quadrature-weighted mean of per-group Gauss values (E, G)."""
    num = sum(float(np.sum(g.wdet * v)) for g, v in zip(system.groups, values))
    return num / total_area(system)


def average_stress(system: GlobalSystem, ev: Evaluation, component: int) -> float:
    """Area average of one Voigt stress component."""
    return area_average(system, [res.sigma[..., component] for res in ev.bulk])


def step_averages(system: GlobalSystem, ev: Evaluation, dt: float) -> Dict[str, float]:
    """
    Averaged dissipation rates and stored energies of a committed step.

    Bulk quantities are area averages; GB quantities are averages per unit
    boundary length and zero without active interface elements.
    """
    out = {
        "D_bar": area_average(system, [r.response.D_inc for r in ev.bulk]) / dt,
        "Dh_bar": area_average(system, [r.response.Dh_inc for r in ev.bulk]) / dt,
        "Psi_rho_bar": area_average(system, [r.state.Wdef for r in ev.bulk]),
        "D_gb": 0.0,
        "Psi_gb": 0.0,
    }
    if ev.gb is not None and system.interface is not None:
        wj = system.interface.wj
        length = system.interface.length
        out["D_gb"] = float(np.sum(wj * ev.gb.D_inc)) / (length * dt)
        out["Psi_gb"] = float(np.sum(wj * gb_defect_energy(ev.gb.state, system.gb_params))) / length
    return out


def nodal_projection(system: GlobalSystem, values: List[np.ndarray]) -> np.ndarray:
    """
    Project per-group Gauss values of shape (E, G, ...) onto the mesh nodes.

    Raises:
        DataError: A node receives no contribution
    """
    mesh = system.mesh
    tail = values[0].shape[2:]
    num = np.zeros((mesh.n_nodes,) + tail)
    den = np.zeros(mesh.n_nodes)
    for group, elems, v in zip(system.groups, system.group_elements, values):
        w = group.wdet[:, :, None] * group.N[None] ** 2
        conn = mesh.elements[elems]
        np.add.at(den, conn, w.sum(axis=1))
        np.add.at(num, conn, np.einsum('ega,eg...->ea...', w, v))
    if np.any(den <= 0.0):
        raise DataError(ErrorCode.DATA_INCOMPLETE, "Nodal projection left nodes without weight")
    return num / den.reshape((-1,) + (1,) * len(tail))


def gnd_fields(system: GlobalSystem, ev: Evaluation) -> Dict[str, np.ndarray]:
    """
    Nodal edge dislocation densities per slip system, shape (n_nodes, k).

    ``rho`` is the total density ``-s·grad(gamma)``, split into the energetic
    part carried by the vector microscopic stress and the dissipated rest.
    """
    total, energetic, dissipative = [], [], []
    for group, res in zip(system.groups, ev.bulk):
        s = group.slips.s
        total.append(-np.einsum('egkq,kq->egk', res.kappa, s))
        energetic.append(res.state.energetic_density(s, system.params))
        dissipative.append(res.state.rho_dis)
    return {
        "rho": nodal_projection(system, total),
        "rho_en": nodal_projection(system, energetic),
        "rho_dis": nodal_projection(system, dissipative),
    }


def plastic_shear(system: GlobalSystem, d_full: np.ndarray) -> np.ndarray:
    """Nodal engineering plastic shear strain 2 eps^p_12 from the nodal slips."""
    mesh = system.mesh
    gamma = nodal_slips(mesh, d_full)
    factors = np.zeros((mesh.n_nodes, mesh.k))
    for group, elems in zip(system.groups, system.group_elements):
        factors[mesh.elements[elems].ravel()] = group.slips.shear
    return np.sum(gamma * factors, axis=1)


def plastic_shear_gradient(system: GlobalSystem, ev: Evaluation) -> np.ndarray:
    """Nodal gradient (n_nodes, 2) of the plastic shear strain."""
    grads = [np.einsum('egkq,k->egq', res.kappa, group.slips.shear)
             for group, res in zip(system.groups, ev.bulk)]
    return nodal_projection(system, grads)


def nodal_slips(mesh, d_full: np.ndarray) -> np.ndarray:
    """(n_nodes, k) slips read from the solution vector."""
    return np.asarray(d_full).reshape(mesh.n_nodes, mesh.dofs_per_node)[:, 2:]


def nodal_displacements(mesh, d_full: np.ndarray) -> np.ndarray:
    return np.asarray(d_full).reshape(mesh.n_nodes, mesh.dofs_per_node)[:, :2]


def switch_response(series, t_switch: float, modulus: float) -> Dict[str, float]:
    """
    Stress-strain slopes of the steps on either side of a constraint switch.

    ``series`` is a stress-strain series with the applied strain in column 2
    and the average stress in column 3. ``elastic_ratio`` is the slope of the
    first step after ``t_switch`` divided by ``modulus``; with the average
    stress equal to ``modulus`` times the elastic strain it stays at or below
    one unless the average plastic strain decreases.

    Raises:
        DataError: No committed step at ``t_switch`` or none on either side of it
    """
    time = series.column("time")
    load = series.column(series.headers[2])
    stress = series.column(series.headers[3])
    hits = np.flatnonzero(np.isclose(time, t_switch, rtol=0.0, atol=1e-9 * max(abs(t_switch), 1.0)))
    if len(hits) == 0 or hits[0] == 0 or hits[0] + 1 >= len(time):
        raise DataError(ErrorCode.DATA_INCOMPLETE,
                        f"No steps on both sides of t={t_switch:g} in '{series.name}'")
    i = int(hits[0])
    before = (stress[i] - stress[i - 1]) / (load[i] - load[i - 1])
    after = (stress[i + 1] - stress[i]) / (load[i + 1] - load[i])
    return {"slope_before": float(before), "slope_after": float(after),
            "elastic_ratio": float(after / modulus)}


def interface_jumps(mesh, d_full: np.ndarray) -> np.ndarray:
    """Slip jumps (n_copies, k) across grain boundaries, duplicated node minus original."""
    gamma = nodal_slips(mesh, d_full)
    copies = mesh.copies
    return gamma[copies[:, 0]] - gamma[copies[:, 1]]
