"""
Structured Q8 meshes with zero-thickness interface elements.

Every node carries ``2 + k`` unknowns ordered (u1, u2, gamma^1 .. gamma^k);
the global index of unknown ``j`` at node ``n`` is ``n * (2 + k) + j``.

Interface elements are stored as six node ids: three on the grain A side
followed by the three geometrically coincident nodes on the grain B side,
both triples ordered (end, middle, end).
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ..core.errorhandler import ErrorCode, MeshError
from ..core.logger import Logger
from .shape import Q8_EDGES

GRAIN_A = 0
GRAIN_B = 1


@dataclass
class InterfaceSet:
    """
    Attributes:
        conn: (I, 6) node ids, A side then B side
        normal: (I, 2) unit normal from grain A to grain B
        measure: (I,) factor scaling the segment length onto the boundary length
    """
    conn: np.ndarray = field(default_factory=lambda: np.zeros((0, 6), dtype=int))
    normal: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    measure: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self):
        return len(self.conn)


@dataclass
class MixedMesh:
    nodes: np.ndarray
    elements: np.ndarray
    grain: np.ndarray
    k: int
    interfaces: InterfaceSet = field(default_factory=InterfaceSet)
    copies: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=int))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def dofs_per_node(self) -> int:
        return 2 + self.k

    @property
    def n_dofs(self) -> int:
        return self.n_nodes * self.dofs_per_node

    def dof(self, nodes, j) -> np.ndarray:
        """Global index of unknown ``j`` (0, 1 displacement, 2 + a slip) at ``nodes``."""
        return np.asarray(nodes, dtype=int) * self.dofs_per_node + j

    def element_dofs(self, elems=None) -> np.ndarray:
        """(E, 16 + 8k) dofs per element: displacements (node, comp) first, then slips (node, system)."""
        conn = self.elements if elems is None else self.elements[elems]
        base = conn[:, :, None] * self.dofs_per_node
        u = (base + np.arange(2)).reshape(len(conn), -1)
        g = (base + 2 + np.arange(self.k)).reshape(len(conn), -1)
        return np.hstack([u, g])

    def interface_dofs(self) -> np.ndarray:
        """(I, 6k) slip dofs of interface elements ordered (side, node, system)."""
        conn = self.interfaces.conn
        return (conn[:, :, None] * self.dofs_per_node + 2 + np.arange(self.k)).reshape(len(conn), -1)

    def nodes_at(self, x1: Optional[float] = None, x2: Optional[float] = None,
                 tol: float = 1e-9) -> np.ndarray:
        """Ids of the nodes on the line x1 = const and/or x2 = const."""
        mask = np.ones(self.n_nodes, dtype=bool)
        if x1 is not None:
            mask &= np.abs(self.nodes[:, 0] - x1) <= tol
        if x2 is not None:
            mask &= np.abs(self.nodes[:, 1] - x2) <= tol
        return np.flatnonzero(mask)

    def centroids(self) -> np.ndarray:
        return self.nodes[self.elements[:, :4]].mean(axis=1)

    def element_size(self) -> float:
        """Square root of the mean corner-polygon area."""
        x = self.nodes[self.elements[:, :4]]
        area = 0.5 * np.abs(np.sum(x[:, :, 0] * np.roll(x[:, :, 1], -1, axis=1)
                                   - np.roll(x[:, :, 0], -1, axis=1) * x[:, :, 1], axis=1))
        return float(np.sqrt(area.mean()))

    def validate(self) -> None:
        """
        Raises:
            MeshError: Interface pairs that do not coincide or dofs out of range
        """
        conn = self.interfaces.conn
        if len(conn):
            gap = np.linalg.norm(self.nodes[conn[:, :3]] - self.nodes[conn[:, 3:]], axis=-1)
            if gap.max() > 1e-10:
                raise MeshError(
                    ErrorCode.MESH_INTERFACE_MISMATCH,
                    f"Interface node pair separated by {gap.max():.3e} mm"
                )
        if self.elements.min() < 0 or self.elements.max() >= self.n_nodes:
            raise MeshError(ErrorCode.MESH_DOF_OUT_OF_RANGE, "Element connectivity refers to a missing node")


def structured_q8_grid(W: float, H: float, nx: int, ny: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rectangular grid of Q8 elements on [0, W] x [0, H].

    Nodes are numbered row by row over the (2nx+1) x (2ny+1) lattice with the
    element centres left out, elements row by row starting at the origin.

    Returns:
        tuple: nodes (n, 2) and elements (nx*ny, 8)

    Raises:
        MeshError: Non-positive sizes or counts
    """
    if not (W > 0.0 and H > 0.0 and nx >= 1 and ny >= 1):
        raise MeshError(
            ErrorCode.MESH_DEGENERATE_GEOMETRY,
            f"Degenerate grid: W={W}, H={H}, nx={nx}, ny={ny}"
        )
    I, J = np.meshgrid(np.arange(2 * nx + 1), np.arange(2 * ny + 1), indexing='xy')
    used = ~((I % 2 == 1) & (J % 2 == 1))
    index = -np.ones(I.shape, dtype=int)
    index[used] = np.arange(np.count_nonzero(used))
    nodes = np.column_stack([I[used] * (W / (2 * nx)), J[used] * (H / (2 * ny))])

    ei, ej = np.meshgrid(np.arange(nx), np.arange(ny), indexing='xy')
    ci, cj = 2 * ei.ravel(), 2 * ej.ravel()
    offsets = [(0, 0), (2, 0), (2, 2), (0, 2), (1, 0), (2, 1), (1, 2), (0, 1)]
    elements = np.column_stack([index[cj + dj, ci + di] for di, dj in offsets])
    return nodes, elements


def insert_interfaces(nodes: np.ndarray, elements: np.ndarray, grain: np.ndarray,
                      normal=None):
    """
    Split the mesh along every element edge shared by grains A and B.

    Nodes on such edges are duplicated; elements of grain B are reconnected to
    the copies. With ``normal`` given, every interface element uses it as its
    orientation and its length is projected onto the boundary line (staircase
    approximation of an inclined boundary); otherwise the edge normal is used.

    Returns:
        tuple: (nodes, elements, InterfaceSet, copies) where copies holds
        (copy, original) node pairs
    """
    nodes = np.asarray(nodes, dtype=float)
    elements = np.array(elements, dtype=int)
    grain = np.asarray(grain, dtype=int)

    edges = {}
    for e in range(len(elements)):
        for local, (a, m, b) in enumerate(Q8_EDGES):
            key = (min(elements[e, a], elements[e, b]), max(elements[e, a], elements[e, b]))
            edges.setdefault(key, []).append((e, local))

    shared = []
    for key in sorted(edges):
        owners = edges[key]
        if len(owners) == 2 and grain[owners[0][0]] != grain[owners[1][0]]:
            shared.append(owners if grain[owners[0][0]] == GRAIN_A else owners[::-1])

    if not shared:
        return nodes, elements, InterfaceSet(), np.zeros((0, 2), dtype=int)

    triples = [elements[eA, list(Q8_EDGES[lA])] for (eA, lA), _ in shared]
    on_interface = np.unique(np.concatenate(triples))
    copy_of = {int(n): len(nodes) + i for i, n in enumerate(on_interface)}
    new_nodes = np.vstack([nodes, nodes[on_interface]])

    b_elems = np.flatnonzero(grain == GRAIN_B)
    for e in b_elems:
        for j in range(8):
            elements[e, j] = copy_of.get(int(elements[e, j]), elements[e, j])

    centroids = new_nodes[elements[:, :4]].mean(axis=1)
    conn, normals, measure = [], [], []
    if normal is not None:
        normal = np.asarray(normal, dtype=float)
        normal = normal / np.linalg.norm(normal)
        boundary_tangent = np.array([-normal[1], normal[0]])
    for ((eA, _), (eB, _)), triple in zip(shared, triples):
        triple = [int(n) for n in triple]
        conn.append(triple + [copy_of[n] for n in triple])
        t = new_nodes[triple[2]] - new_nodes[triple[0]]
        t = t / np.linalg.norm(t)
        if normal is None:
            n = np.array([t[1], -t[0]])
            if np.dot(n, centroids[eB] - centroids[eA]) < 0.0:
                n = -n
            normals.append(n)
            measure.append(1.0)
        else:
            normals.append(normal)
            measure.append(abs(float(np.dot(t, boundary_tangent))))

    copies = np.array([(copy_of[int(n)], int(n)) for n in on_interface], dtype=int)
    Logger().debug(f"Inserted {len(conn)} interface elements, {len(copies)} duplicated nodes")
    return new_nodes, elements, InterfaceSet(np.array(conn, dtype=int), np.array(normals),
                                             np.array(measure)), copies


def build_mesh(W: float, H: float, nx: int, ny: int, k: int, grain_of=None,
               interface_normal=None) -> MixedMesh:
    """
    Structured mesh with grains assigned by element centroid.

    Args:
        W, H: Domain size
        nx, ny: Element counts
        k: Slip systems per node
        grain_of: Callable mapping centroids (E, 2) to grain ids; single grain if None
        interface_normal: Fixed boundary normal for inclined boundaries
    """
    nodes, elements = structured_q8_grid(W, H, nx, ny)
    centroids = nodes[elements[:, :4]].mean(axis=1)
    if grain_of is None:
        grain = np.zeros(len(elements), dtype=int)
        interfaces, copies = InterfaceSet(), np.zeros((0, 2), dtype=int)
    else:
        grain = np.asarray(grain_of(centroids), dtype=int)
        nodes, elements, interfaces, copies = insert_interfaces(nodes, elements, grain, interface_normal)
    mesh = MixedMesh(nodes=nodes, elements=elements, grain=grain, k=k,
                     interfaces=interfaces, copies=copies)
    mesh.validate()
    return mesh
