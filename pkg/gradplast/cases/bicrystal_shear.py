"""
Periodic bicrystal under simple shear.

The cell [0, 2W] x [0, H] holds one full grain A in [W/2, 3W/2] between two
half grains B that the left-right periodicity joins into one grain. The
response only varies along x1, so one element row suffices.
"""

import numpy as np

from ..fem.constraints import ConstraintSet
from ..fem.mesh import GRAIN_A, GRAIN_B, MixedMesh, build_mesh
from . import postprocess as post
from .base import BenchmarkCase, match_nodes, sort_along
from .outputs import OutputSeries


class BicrystalShearCase(BenchmarkCase):
    stress_component = 2

    def build_mesh(self) -> MixedMesh:
        geo = self.cfg.geometry
        W = geo.W

        def grain_of(centroids):
            x1 = centroids[:, 0]
            return np.where((x1 >= 0.5 * W) & (x1 <= 1.5 * W), GRAIN_A, GRAIN_B)

        return build_mesh(2.0 * W, geo.H, geo.nx, geo.ny, self.k, grain_of=grain_of)

    def build_constraints(self) -> ConstraintSet:
        mesh = self.mesh
        geo = self.cfg.geometry
        cs = ConstraintSet(mesh.n_dofs)
        self.tie_copies(cs)

        left, right = match_nodes(mesh, mesh.nodes_at(x1=0.0), mesh.nodes_at(x1=2.0 * geo.W), axis=1)
        for j in range(mesh.dofs_per_node):
            cs.add_tie(mesh.dof(right, j), mesh.dof(left, j))

        bottom, top = match_nodes(mesh, mesh.nodes_at(x2=0.0), mesh.nodes_at(x2=geo.H), axis=0)
        cs.add_tie(mesh.dof(top, 0), mesh.dof(bottom, 0), scale=geo.H)
        for j in [1, *self.slip_components]:
            cs.add_tie(mesh.dof(top, j), mesh.dof(bottom, j))

        origin = mesh.nodes_at(x1=0.0, x2=0.0)
        cs.add_dirichlet(self.node_dofs(origin, (0, 1)))

        if self.cfg.grain_boundary.mode == "micro-hard":
            cs.add_dirichlet(self.node_dofs(self.interface_nodes(), self.slip_components))
        return cs

    def profile(self, d_full: np.ndarray, ev) -> OutputSeries:
        """Slip and GND densities along the bottom edge; GB nodes appear once per grain."""
        mesh = self.mesh
        nodes = sort_along(mesh, mesh.nodes_at(x2=0.0), axis=0)
        series = OutputSeries("profile", ["x1"] + self.slip_headers("gamma") + self.slip_headers("rho")
                              + self.slip_headers("rho_en") + self.slip_headers("rho_dis"))
        gamma = post.nodal_slips(mesh, d_full)
        gnd = post.gnd_fields(self.system, ev)
        for n in nodes:
            series.append([mesh.nodes[n, 0], *gamma[n], *gnd["rho"][n], *gnd["rho_en"][n],
                           *gnd["rho_dis"][n]])
        return series
