"""
Benchmark cases, post-processing and output writers.
"""

from .loading import LoadProgram
from .outputs import OutputSeries, write_outputs, write_manifest, write_convergence, write_mesh_dump
from .base import BenchmarkCase, CaseOutputs, run_case, bulk_params_from_config, gb_params_from_config
from .shear_layer import ShearLayerCase
from .bicrystal_shear import BicrystalShearCase
from .bicrystal_tension import BicrystalTensionCase

CASES = {
    "shear_layer": ShearLayerCase,
    "bicrystal_shear": BicrystalShearCase,
    "bicrystal_tension": BicrystalTensionCase,
}

__all__ = [
    'LoadProgram', 'OutputSeries', 'write_outputs', 'write_manifest', 'write_convergence',
    'write_mesh_dump',
    'BenchmarkCase', 'CaseOutputs', 'run_case', 'bulk_params_from_config', 'gb_params_from_config',
    'ShearLayerCase', 'BicrystalShearCase', 'BicrystalTensionCase', 'CASES',
]
