"""
Common driver of the benchmark cases.

A case supplies its mesh, its constraints and its profile extraction; the
driver wires material data, the element system, the loading program and the
time march together and collects the output series while stepping.
"""

import os
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..core.config import CaseConfig
from ..core.errorhandler import ErrorCode, MeshError
from ..core.logger import Logger
from ..fem.assembly import Evaluation, GlobalSystem
from ..fem.constraints import ConstraintSet
from ..fem.mesh import GRAIN_A, GRAIN_B, MixedMesh
from ..fem.solver import Event, MarchResult, time_march
from ..material.bulk import BulkMaterialParams
from ..material.grain_boundary import GbMaterialParams
from ..material.kinematics import ElasticLaw, SlipSet, build_slip_systems
from . import postprocess as post
from .loading import LoadProgram
from .outputs import (
    AVERAGE_FIELDS, OutputSeries, average_headers, stress_strain_headers, write_convergence, write_manifest,
    write_outputs
)


def bulk_params_from_config(cfg: CaseConfig) -> BulkMaterialParams:
    mat, model = cfg.material, cfg.model
    return BulkMaterialParams(
        elastic=ElasticLaw(mat.E, mat.nu),
        S0=mat.S0, d0_dot=mat.d0_dot, m_rate=mat.m_rate, omega=mat.omega,
        Lstar=model.Lstar, zeta=mat.zeta, q_latent=mat.q_latent, h_self=mat.h_self,
        model=model.kind, L_en=model.L_en, L_d=model.L_d,
    )


def gb_params_from_config(cfg: CaseConfig) -> GbMaterialParams:
    gb = cfg.grain_boundary
    return GbMaterialParams(c_s=gb.c_s, zeta_s=gb.zeta_s, mode=gb.mode)


def match_nodes(mesh: MixedMesh, leaders: np.ndarray, followers: np.ndarray, axis: int,
                tol: float = 1e-9):
    """
    Pair two node sets by their coordinate along ``axis``.

    Duplicated interface nodes are only paired with duplicated nodes.

    Raises:
        MeshError: The sets do not match one to one
    """
    copies = set(mesh.copies[:, 0].tolist())
    out_l, out_f = [], []
    for want_copy in (False, True):
        lead = np.array([n for n in leaders if (n in copies) == want_copy], dtype=int)
        foll = np.array([n for n in followers if (n in copies) == want_copy], dtype=int)
        lead = lead[np.argsort(mesh.nodes[lead, axis], kind='stable')]
        foll = foll[np.argsort(mesh.nodes[foll, axis], kind='stable')]
        if len(lead) != len(foll) or np.any(np.abs(mesh.nodes[lead, axis] - mesh.nodes[foll, axis]) > tol):
            raise MeshError(ErrorCode.MESH_INTERFACE_MISMATCH, "Periodic node sets do not match")
        out_l.append(lead)
        out_f.append(foll)
    return np.concatenate(out_l), np.concatenate(out_f)


def sort_along(mesh: MixedMesh, nodes: np.ndarray, axis: int) -> np.ndarray:
    """
    Order nodes along ``axis``; coincident nodes are ordered by the position of
    the elements they belong to, so a profile crosses a boundary from the
    upstream grain to the downstream one.
    """
    nodes = np.asarray(nodes, dtype=int)
    centroids = mesh.centroids()[:, axis]
    owner = np.zeros(mesh.n_nodes)
    count = np.zeros(mesh.n_nodes)
    np.add.at(owner, mesh.elements, np.repeat(centroids[:, None], 8, axis=1))
    np.add.at(count, mesh.elements, 1.0)
    side = owner[nodes] / np.maximum(count[nodes], 1.0)
    return nodes[np.lexsort((nodes, side, mesh.nodes[nodes, axis]))]


@dataclass
class CaseOutputs:
    series: List[OutputSeries]
    march: MarchResult
    profiles: List[Dict[str, Any]] = field(default_factory=list)

    def get(self, name: str) -> Optional[OutputSeries]:
        return next((s for s in self.series if s.name == name), None)


class BenchmarkCase:
    """
    Base class of the benchmark problems.

    Subclasses implement :meth:`build_mesh`, :meth:`build_constraints` and
    :meth:`profile`; they may add :meth:`events` and override
    :attr:`stress_component` (Voigt index of the reported stress) together
    with the column names :attr:`load_header` and :attr:`stress_header`.
    """
    stress_component = 2
    load_header = "Gamma"
    stress_header = "sigma12_avg"

    def __init__(self, cfg: CaseConfig):
        self.cfg = cfg
        self.logger = Logger()
        self.program = LoadProgram(cfg.loading)
        self.params = bulk_params_from_config(cfg)
        self.gb_params = gb_params_from_config(cfg)
        self.slips = {
            GRAIN_A: SlipSet(build_slip_systems(cfg.geometry.angles_A)),
            GRAIN_B: SlipSet(build_slip_systems(cfg.geometry.angles_B)),
        }
        self.k = self.slips[GRAIN_A].k
        self.mesh = self.build_mesh()
        self.system = GlobalSystem(self.mesh, self.params, self.slips, self.gb_params)
        self.constraints = self.build_constraints()
        self.logger.info(
            f"Case '{cfg.name}' ({cfg.kind}): {self.mesh.n_elements} elements, "
            f"{self.mesh.n_nodes} nodes, {len(self.mesh.interfaces)} interface elements"
        )

    # Hooks
    def build_mesh(self) -> MixedMesh:
        raise NotImplementedError

    def build_constraints(self) -> ConstraintSet:
        raise NotImplementedError

    def profile(self, d_full: np.ndarray, ev: Evaluation) -> OutputSeries:
        raise NotImplementedError

    def events(self) -> List[Event]:
        return []

    # Shared helpers
    def node_dofs(self, nodes, components) -> np.ndarray:
        """(len(nodes) * len(components),) global dofs, component-major."""
        return np.concatenate([self.mesh.dof(nodes, j) for j in components])

    @property
    def slip_components(self) -> range:
        return range(2, 2 + self.k)

    def tie_copies(self, constraints: ConstraintSet, components=(0, 1)) -> None:
        """Duplicated interface nodes follow their originals in ``components``."""
        copies = self.mesh.copies
        if len(copies) == 0:
            return
        for j in components:
            constraints.add_tie(self.mesh.dof(copies[:, 0], j), self.mesh.dof(copies[:, 1], j))

    def interface_nodes(self) -> np.ndarray:
        return np.unique(self.mesh.interfaces.conn)

    def slip_headers(self, prefix: str) -> List[str]:
        return [f"{prefix}_{a + 1}" for a in range(self.k)]

    def fields(self, d_full: np.ndarray, ev: Evaluation) -> OutputSeries:
        """Nodal snapshot of displacements, slips and GND densities."""
        mesh = self.mesh
        series = OutputSeries("fields", ["node", "x1", "x2", "u1", "u2"]
                              + self.slip_headers("gamma") + self.slip_headers("rho"))
        u = post.nodal_displacements(mesh, d_full)
        gamma = post.nodal_slips(mesh, d_full)
        rho = post.gnd_fields(self.system, ev)["rho"]
        for n in range(mesh.n_nodes):
            series.append([n, *mesh.nodes[n], *u[n], *gamma[n], *rho[n]])
        return series

    # Driver
    def run(self) -> CaseOutputs:
        cfg = self.cfg
        sol = cfg.solver
        stress = OutputSeries("stress_strain", stress_strain_headers(self.load_header, self.stress_header))
        averages = OutputSeries("averages", average_headers(self.load_header))
        profiles: List[OutputSeries] = []
        profile_info: List[Dict[str, Any]] = []
        profile_times = [self.program.time_of_load(v) for v in cfg.output.profile_loads]
        tol_t = 1e-9 * sol.t_end
        last = {"t": 0.0, "d": None, "ev": None}

        def on_commit(step, t, lam, d_full, ev):
            dt = t - last["t"] if step > 0 else sol.dt_initial
            stress.append([step, t, lam, post.average_stress(self.system, ev, self.stress_component)])
            avg = post.step_averages(self.system, ev, dt)
            averages.append([step, t, lam] + [avg[h] for h in AVERAGE_FIELDS])
            for pt in profile_times:
                if abs(pt - t) <= tol_t:
                    snap = self.profile(d_full, ev)
                    snap.name = f"profile_{len(profiles):03d}"
                    profiles.append(snap)
                    profile_info.append({"file": snap.file_name, "step": step, "time": t, "load": lam})
            last.update(t=t, d=d_full, ev=ev)

        force_scale = self.params.elastic.E * self.mesh.element_size()
        march = time_march(
            self.system, self.constraints, self.program, sol.t_end, sol.dt_initial, sol.dt_min,
            sol.dt_max, sol.newton_tol_rel, sol.newton_tol_abs * force_scale, sol.max_newton_iter,
            cutback_factor=sol.cutback_factor, growth_factor=sol.growth_factor,
            growth_delay=sol.growth_delay, stall_window=sol.stall_window, stall_factor=sol.stall_factor,
            breakpoints=self.program.kinks(sol.t_end) + profile_times, events=self.events(),
            on_commit=on_commit,
        )

        if not profiles:
            snap = self.profile(last["d"], last["ev"])
            snap.name = "profile_000"
            profiles.append(snap)
            profile_info.append({"file": snap.file_name, "step": march.steps, "time": last["t"],
                                 "load": self.program(last["t"])})

        series = []
        if "stress_strain" in cfg.output.series:
            series.append(stress)
        if "averages" in cfg.output.series:
            series.append(averages)
        if "profiles" in cfg.output.series:
            series.extend(profiles)
        if "fields" in cfg.output.series:
            series.append(self.fields(last["d"], last["ev"]))
        return CaseOutputs(series=series, march=march, profiles=profile_info)


def run_case(cfg: CaseConfig, out_dir: Optional[str] = None) -> CaseOutputs:
    """
    Run one configured case and, with ``out_dir`` given, write its files.
    """
    from . import CASES

    start = time.perf_counter()
    case = CASES[cfg.kind](cfg)
    outputs = case.run()
    wall = time.perf_counter() - start
    if out_dir is not None:
        write_outputs(outputs.series, out_dir)
        march = outputs.march
        write_manifest(out_dir, cfg.to_dict(), wall, {
            "steps": march.steps, "cutbacks": march.cutbacks,
            "newton_iterations": march.newton_iterations,
            "elements": case.mesh.n_elements, "nodes": case.mesh.n_nodes,
            "interface_elements": len(case.mesh.interfaces),
        }, profiles=outputs.profiles)
        write_convergence(out_dir, march.report)
        Logger().info(f"Run '{cfg.name}' finished in {wall:.1f} s, results in {os.path.abspath(out_dir)}")
    return outputs
