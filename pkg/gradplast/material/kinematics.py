"""
Slip-system geometry and plane-strain elasticity.

Conventions used across the package:

- strains in Voigt form ``[e11, e22, 2*e12]``
- stresses in Voigt form ``[s11, s22, s12]``
- the Schmid vector ``t`` is the Voigt strain form of the symmetric Schmid
  tensor, so the resolved shear stress is ``tau = t @ sigma``

Screw dislocations vanish identically in the plane, only edge densities are
carried.
"""

from dataclasses import dataclass, field
from typing import Iterable, List, Sequence

import numpy as np

from ..core.errorhandler import ErrorCode, MaterialError


@dataclass(frozen=True)
class SlipSystem:
    """One in-plane slip system inclined by ``theta`` (radians) to the x1 axis."""
    theta: float
    s: np.ndarray = field(repr=False)
    m: np.ndarray = field(repr=False)
    schmid: np.ndarray = field(repr=False)
    schmid_sym: np.ndarray = field(repr=False)

    @property
    def schmid_voigt(self) -> np.ndarray:
        T = self.schmid_sym
        return np.array([T[0, 0], T[1, 1], 2.0 * T[0, 1]])

    @property
    def projector(self) -> np.ndarray:
        """s ⊗ s, maps a slip gradient onto its tangential part."""
        return np.outer(self.s, self.s)

    @property
    def plastic_shear_factor(self) -> float:
        """Contribution of unit slip to the engineering plastic shear 2*eps_p12."""
        return float(self.s[0] * self.m[1] + self.s[1] * self.m[0])


def build_slip_system(theta: float) -> SlipSystem:
    """
    Build a slip system from its inclination.

    Args:
        theta: Angle between slip direction and +x1 in radians

    Raises:
        MaterialError: If theta is not finite
    """
    if not np.isfinite(theta):
        raise MaterialError(ErrorCode.MAT_INVALID_PARAMETER, f"Slip angle must be finite: {theta}")
    c, s_ = np.cos(theta), np.sin(theta)
    s = np.array([c, s_])
    m = np.array([-s_, c])
    schmid = np.outer(s, m)
    return SlipSystem(theta=float(theta), s=s, m=m, schmid=schmid,
                      schmid_sym=0.5 * (schmid + schmid.T))


def build_slip_systems(angles_deg: Iterable[float]) -> List[SlipSystem]:
    """Slip systems from angles in degrees (config convention)."""
    return [build_slip_system(np.deg2rad(a)) for a in angles_deg]


def tangential_slip_gradient(sys: SlipSystem, kappa: np.ndarray) -> np.ndarray:
    """(s·κ)s; ``kappa`` may carry leading batch axes."""
    kappa = np.asarray(kappa, dtype=float)
    return (kappa @ sys.s)[..., None] * sys.s


def edge_gnd_density(sys: SlipSystem, kappa: np.ndarray) -> np.ndarray:
    """Edge dislocation density −s·κ."""
    return -(np.asarray(kappa, dtype=float) @ sys.s)


@dataclass(frozen=True)
class SlipSet:
    """
    Stacked arrays of the k slip systems of one grain.

    Attributes:
        s, m: (k, 2) slip directions and normals
        t: (k, 3) Schmid vectors in Voigt strain form
        P: (k, 2, 2) tangential projectors s ⊗ s
        shear: (k,) factors s1*m2 + s2*m1 for the plastic shear strain
    """
    systems: Sequence[SlipSystem]

    @property
    def k(self) -> int:
        return len(self.systems)

    @property
    def s(self) -> np.ndarray:
        return np.array([sy.s for sy in self.systems])

    @property
    def m(self) -> np.ndarray:
        return np.array([sy.m for sy in self.systems])

    @property
    def t(self) -> np.ndarray:
        return np.array([sy.schmid_voigt for sy in self.systems])

    @property
    def P(self) -> np.ndarray:
        return np.array([sy.projector for sy in self.systems])

    @property
    def shear(self) -> np.ndarray:
        return np.array([sy.plastic_shear_factor for sy in self.systems])


def hardening_matrix(slips: SlipSet, h: float, q: float) -> np.ndarray:
    """
    Interaction moduli h^{ab}: h for coplanar pairs (parallel normals), q*h otherwise.
    """
    m = slips.m
    cross = np.abs(m[:, None, 0] * m[None, :, 1] - m[:, None, 1] * m[None, :, 0])
    coplanar = cross < 1e-12
    return np.where(coplanar, h, q * h)


@dataclass(frozen=True)
class ElasticLaw:
    """Isotropic plane-strain elasticity."""
    E: float
    nu: float

    def __post_init__(self):
        if not (self.E > 0.0) or not (-1.0 < self.nu < 0.5):
            raise MaterialError(
                ErrorCode.MAT_INVALID_PARAMETER,
                f"Elastic constants out of range: E={self.E}, nu={self.nu}"
            )

    @property
    def lam(self) -> float:
        return self.E * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))

    @property
    def mu(self) -> float:
        return self.E / (2.0 * (1.0 + self.nu))

    @property
    def C(self) -> np.ndarray:
        lam, mu = self.lam, self.mu
        return np.array([
            [lam + 2.0 * mu, lam, 0.0],
            [lam, lam + 2.0 * mu, 0.0],
            [0.0, 0.0, mu],
        ])

    def stress(self, strain_voigt: np.ndarray) -> np.ndarray:
        return np.asarray(strain_voigt) @ self.C.T

    def out_of_plane_stress(self, strain_voigt: np.ndarray) -> np.ndarray:
        strain_voigt = np.asarray(strain_voigt)
        return self.lam * (strain_voigt[..., 0] + strain_voigt[..., 1])
