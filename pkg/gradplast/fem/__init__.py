"""
Finite element layer: shape functions, meshes, constraints, elements, assembly and solvers.
"""

from .shape import Q8_NODES, Q8_EDGES, q8_shape, gauss_legendre, gauss_3x3, line3_shape
from .mesh import GRAIN_A, GRAIN_B, InterfaceSet, MixedMesh, structured_q8_grid, insert_interfaces, build_mesh
from .constraints import ConstraintSet, ConstraintMap
from .elements import (
    ElementMatrices, BulkResult, InterfaceResult, BulkElementGroup, InterfaceElementGroup, bulk_element
)
from .assembly import SystemState, Evaluation, GlobalSystem, assemble, stack_orientations
from .solver import NewtonResult, Event, MarchResult, linear_solve, newton_solve, time_march

__all__ = [
    'Q8_NODES', 'Q8_EDGES', 'q8_shape', 'gauss_legendre', 'gauss_3x3', 'line3_shape',
    'GRAIN_A', 'GRAIN_B', 'InterfaceSet', 'MixedMesh', 'structured_q8_grid', 'insert_interfaces',
    'build_mesh',
    'ConstraintSet', 'ConstraintMap',
    'ElementMatrices', 'BulkResult', 'InterfaceResult', 'BulkElementGroup',
    'InterfaceElementGroup', 'bulk_element',
    'SystemState', 'Evaluation', 'GlobalSystem', 'assemble', 'stack_orientations',
    'NewtonResult', 'Event', 'MarchResult', 'linear_solve', 'newton_solve', 'time_march',
]
