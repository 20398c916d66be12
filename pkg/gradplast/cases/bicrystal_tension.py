"""
Bicrystal in tension with an inclined grain boundary.

The domain [0, 2W] x [0, H] is split by the line x1 + x2 = W + H/2, which
runs at 45 degrees to the negative x1 axis through the centre. The structured
grid assigns whole elements to the grains, so the boundary is a staircase;
interface elements carry the normal of the straight boundary and their
length is projected onto it.

The left edge is micro-clamped, the right edge is pulled along x1 with
slip fixed to zero.
"""

import numpy as np

from ..fem.constraints import ConstraintSet
from ..fem.mesh import GRAIN_A, GRAIN_B, MixedMesh, build_mesh
from ..material.grain_boundary import build_gb_orientation
from . import postprocess as post
from .base import BenchmarkCase, sort_along
from .outputs import OutputSeries

GB_NORMAL = np.array([1.0, 1.0]) / np.sqrt(2.0)


class BicrystalTensionCase(BenchmarkCase):
    stress_component = 0
    load_header = "eps11"
    stress_header = "sigma11_avg"

    def build_mesh(self) -> MixedMesh:
        geo = self.cfg.geometry
        limit = geo.W + 0.5 * geo.H

        def grain_of(centroids):
            return np.where(centroids.sum(axis=1) < limit, GRAIN_A, GRAIN_B)

        return build_mesh(2.0 * geo.W, geo.H, geo.nx, geo.ny, self.k, grain_of=grain_of,
                          interface_normal=GB_NORMAL)

    def transmitted_systems(self) -> np.ndarray:
        """Systems with the same direction in both grains that lie in the boundary plane."""
        orient = build_gb_orientation(self.slips[GRAIN_A], self.slips[GRAIN_B], GB_NORMAL)
        same = np.all(np.abs(self.slips[GRAIN_A].s - self.slips[GRAIN_B].s) < 1e-12, axis=1)
        in_plane = np.all(np.abs(orient.c) < 1e-12, axis=0)
        return np.flatnonzero(same & in_plane)

    def build_constraints(self) -> ConstraintSet:
        mesh = self.mesh
        geo = self.cfg.geometry
        cs = ConstraintSet(mesh.n_dofs)
        self.tie_copies(cs)
        transmitted = self.transmitted_systems()
        if len(transmitted):
            self.tie_copies(cs, components=[2 + a for a in transmitted])
            self.logger.debug(f"Slip systems {list(transmitted + 1)} are continuous across the boundary")

        left = mesh.nodes_at(x1=0.0)
        right = mesh.nodes_at(x1=2.0 * geo.W)
        cs.add_dirichlet(self.node_dofs(left, range(mesh.dofs_per_node)))
        cs.add_dirichlet(mesh.dof(right, 0), scale=2.0 * geo.W)
        cs.add_dirichlet(self.node_dofs(right, [1, *self.slip_components]))

        if self.cfg.grain_boundary.mode == "micro-hard":
            cs.add_dirichlet(self.node_dofs(self.interface_nodes(), self.slip_components))
        return cs

    def profile(self, d_full: np.ndarray, ev) -> OutputSeries:
        """Slip and GND densities along the horizontal line x2 = profile_x2."""
        mesh = self.mesh
        line = mesh.nodes_at(x2=self.cfg.output.profile_x2)
        if len(line) == 0:
            # closest node row
            rows = np.unique(np.round(mesh.nodes[:, 1], 12))
            x2 = rows[np.argmin(np.abs(rows - self.cfg.output.profile_x2))]
            line = mesh.nodes_at(x2=x2)
        nodes = sort_along(mesh, line, axis=0)
        series = OutputSeries("profile", ["x1"] + self.slip_headers("gamma") + self.slip_headers("rho"))
        gamma = post.nodal_slips(mesh, d_full)
        rho = post.gnd_fields(self.system, ev)["rho"]
        for n in nodes:
            series.append([mesh.nodes[n, 0], *gamma[n], *rho[n]])
        return series
