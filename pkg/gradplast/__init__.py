"""
GradPlast: 2D finite-element solver for strain-gradient crystal plasticity
with a dissipative grain-boundary model.
"""

__version__ = "0.1.0"
