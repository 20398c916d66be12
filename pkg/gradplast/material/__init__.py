"""
Constitutive layer: slip kinematics, bulk and grain-boundary material kernels.
"""

from .kinematics import (
    SlipSystem, SlipSet, ElasticLaw, build_slip_system, build_slip_systems,
    tangential_slip_gradient, edge_gnd_density, hardening_matrix
)
from .bulk import (
    MODELS, BulkMaterialParams, BulkState, BulkResponse, rate_sensitivity, rate_sensitivity_derivative,
    scalar_microstress, update_slip_resistance, update_vector_microstress,
    vector_microstress_tangent_gamma, vector_microstress_tangent_kappa,
    gurtin_dissipative_stresses, dissipation_increment, audit_dissipation, defect_energy_density,
    update_bulk
)
from .grain_boundary import (
    GB_MODES, SIDE_SIGN, GbOrientation, GbMaterialParams, GbState, build_gb_orientation,
    gb_burgers_increment, update_gb_stress, gb_traction, gb_tractions, gb_stress_tangent,
    gb_defect_energy, audit_gb_dissipation
)

__all__ = [
    'SlipSystem', 'SlipSet', 'ElasticLaw', 'build_slip_system', 'build_slip_systems',
    'tangential_slip_gradient', 'edge_gnd_density', 'hardening_matrix',
    'MODELS', 'BulkMaterialParams', 'BulkState', 'BulkResponse', 'rate_sensitivity',
    'rate_sensitivity_derivative', 'scalar_microstress', 'update_slip_resistance',
    'update_vector_microstress', 'vector_microstress_tangent_gamma',
    'vector_microstress_tangent_kappa', 'gurtin_dissipative_stresses', 'dissipation_increment',
    'audit_dissipation', 'defect_energy_density', 'update_bulk',
    'GB_MODES', 'SIDE_SIGN', 'GbOrientation', 'GbMaterialParams', 'GbState', 'build_gb_orientation',
    'gb_burgers_increment', 'update_gb_stress', 'gb_traction', 'gb_tractions',
    'gb_stress_tangent', 'gb_defect_energy', 'audit_gb_dissipation',
]
