"""
Infinite single-crystal layer under simple shear.

One column of elements over the height H; the lateral edges are tied on
every unknown so the column stands for a layer of infinite extent. The
bottom is fixed, the top is displaced by ``H * Gamma(t)`` along x1.
"""

from typing import List

import numpy as np

from ..fem.constraints import ConstraintSet
from ..fem.mesh import MixedMesh, build_mesh
from ..fem.solver import Event
from . import postprocess as post
from .base import BenchmarkCase, match_nodes, sort_along
from .outputs import OutputSeries


class ShearLayerCase(BenchmarkCase):
    stress_component = 2

    def build_mesh(self) -> MixedMesh:
        geo = self.cfg.geometry
        return build_mesh(geo.W, geo.H, geo.nx, geo.ny, self.k)

    def boundary_nodes(self) -> np.ndarray:
        H = self.cfg.geometry.H
        return np.concatenate([self.mesh.nodes_at(x2=0.0), self.mesh.nodes_at(x2=H)])

    def build_constraints(self) -> ConstraintSet:
        mesh = self.mesh
        geo = self.cfg.geometry
        cs = ConstraintSet(mesh.n_dofs)

        bottom = mesh.nodes_at(x2=0.0)
        top = mesh.nodes_at(x2=geo.H)
        cs.add_dirichlet(self.node_dofs(bottom, (0, 1)))
        cs.add_dirichlet(mesh.dof(top, 0), scale=geo.H)
        cs.add_dirichlet(mesh.dof(top, 1))

        left, right = match_nodes(mesh, mesh.nodes_at(x1=0.0), mesh.nodes_at(x1=geo.W), axis=1)
        for j in range(mesh.dofs_per_node):
            cs.add_tie(mesh.dof(right, j), mesh.dof(left, j))

        if geo.micro_bc == "hard":
            cs.add_dirichlet(self.node_dofs(self.boundary_nodes(), self.slip_components))
        return cs

    def events(self) -> List[Event]:
        if self.cfg.loading.kind != "nonproportional":
            return []
        dofs = self.node_dofs(self.boundary_nodes(), self.slip_components)

        def switch_to_micro_hard(constraints: ConstraintSet, d_full: np.ndarray) -> None:
            constraints.hold(dofs, d_full[dofs])

        return [Event(self.program.switch_time, "micro-hard switch", switch_to_micro_hard)]

    def profile(self, d_full: np.ndarray, ev) -> OutputSeries:
        """Through-thickness profile along the left edge."""
        mesh = self.mesh
        nodes = sort_along(mesh, mesh.nodes_at(x1=0.0), axis=1)
        series = OutputSeries("profile", ["x2"] + self.slip_headers("gamma")
                              + ["gamma_p12", "dgamma_p12_dx2"] + self.slip_headers("rho"))
        gamma = post.nodal_slips(mesh, d_full)
        gp = post.plastic_shear(self.system, d_full)
        grad = post.plastic_shear_gradient(self.system, ev)
        rho = post.gnd_fields(self.system, ev)["rho"]
        for n in nodes:
            series.append([mesh.nodes[n, 1], *gamma[n], gp[n], grad[n, 1], *rho[n]])
        return series
