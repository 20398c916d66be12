"""
Grain-boundary constitutive kernel.

In the plane only the (i, 3) components of the GB Burgers tensor, of the
energetic GB stress and of the Schmid orientation tensors survive, so each of
them is stored as a 2-vector. For slip system ``a`` of grain ``I`` the
orientation reduces to ``c_I^a s_I^a`` with ``c = m1 n2 - m2 n1``.

Side index 0 is grain A (upstream of the normal), side 1 is grain B.
"""

from dataclasses import dataclass, replace

import numpy as np

from ..core.errorhandler import ErrorCode, GrainBoundaryError, MaterialError
from .bulk import audit_dissipation
from .kinematics import SlipSet

GB_MODES = ("proposed", "micro-free", "micro-hard")
SIDE_SIGN = np.array([-1.0, 1.0])


@dataclass(frozen=True)
class GbOrientation:
    """
    Reduced orientation data of one boundary.

    Attributes:
        n_s: (2,) unit normal pointing from grain A to grain B
        s: (2, k, 2) slip directions per side
        c: (2, k) out-of-plane factors m x n_s per side
    """
    n_s: np.ndarray
    s: np.ndarray
    c: np.ndarray

    @property
    def k(self) -> int:
        return self.c.shape[-1]

    @property
    def V(self) -> np.ndarray:
        """(2, k, 2) derivative of the GB Burgers vector w.r.t. the slip on each side."""
        return SIDE_SIGN[:, None, None] * self.c[..., None] * self.s

    def interaction_moduli(self) -> np.ndarray:
        """C[I, a, J, b] = (s_I^a · s_J^b) c_I^a c_J^b."""
        dots = np.einsum("...iaq,...jbq->...iajb", self.s, self.s)
        return dots * self.c[..., :, :, None, None] * self.c[..., None, None, :, :]


def build_gb_orientation(slips_A: SlipSet, slips_B: SlipSet, n_s) -> GbOrientation:
    """
    Reduced orientation objects of both grains at a boundary with normal ``n_s``.

    Raises:
        GrainBoundaryError: If n_s is not a unit vector or the grains differ in k
    """
    n_s = np.asarray(n_s, dtype=float)
    if n_s.shape != (2,) or abs(np.linalg.norm(n_s) - 1.0) > 1e-10:
        raise GrainBoundaryError(ErrorCode.GB_INVALID_PARAMETER, f"GB normal must be a unit 2-vector: {n_s}")
    if slips_A.k != slips_B.k:
        raise GrainBoundaryError(
            ErrorCode.GB_INVALID_PARAMETER,
            f"Grains carry different numbers of slip systems: {slips_A.k} vs {slips_B.k}"
        )
    s = np.array([slips_A.s, slips_B.s])
    m = np.array([slips_A.m, slips_B.m])
    c = m[..., 0] * n_s[1] - m[..., 1] * n_s[0]
    return GbOrientation(n_s=n_s, s=s, c=c)


def gb_burgers_increment(orient: GbOrientation, dgamma_A, dgamma_B) -> np.ndarray:
    """Reduced GB Burgers vector increment sum(dgB cB sB - dgA cA sA)."""
    V = orient.V
    return np.einsum('...a,...aq->...q', np.asarray(dgamma_A, dtype=float), V[..., 0, :, :]) \
        + np.einsum('...a,...aq->...q', np.asarray(dgamma_B, dtype=float), V[..., 1, :, :])


@dataclass(frozen=True)
class GbMaterialParams:
    c_s: float = 0.0
    zeta_s: float = 0.0
    mode: str = "proposed"

    def __post_init__(self):
        if self.c_s < 0.0 or self.zeta_s < 0.0:
            raise GrainBoundaryError(
                ErrorCode.GB_INVALID_PARAMETER,
                f"c_s and zeta_s must be non-negative: c_s={self.c_s}, zeta_s={self.zeta_s}"
            )
        if self.mode not in GB_MODES:
            raise GrainBoundaryError(ErrorCode.GB_INVALID_PARAMETER, f"Unknown GB mode: {self.mode}")


@dataclass
class GbState:
    """History of a batch of GB points: ``M`` (B, 2), ``G_cum`` and ``D_acc`` (B,)."""
    M: np.ndarray
    G_cum: np.ndarray
    D_acc: np.ndarray

    @classmethod
    def virgin(cls, shape) -> "GbState":
        shape = tuple(np.atleast_1d(shape))
        return cls(M=np.zeros(shape + (2,)), G_cum=np.zeros(shape), D_acc=np.zeros(shape))

    def copy(self) -> "GbState":
        return replace(self, M=self.M.copy(), G_cum=self.G_cum.copy(), D_acc=self.D_acc.copy())


def update_gb_stress(state: GbState, dG, p: GbMaterialParams):
    """
    Backward-Euler update of the energetic GB stress.

    Returns:
        tuple: (new GbState, dissipation increment per point)

    Raises:
        GrainBoundaryError: Recovery without hardening (c_s = 0, zeta_s > 0)
    """
    if p.c_s == 0.0 and p.zeta_s > 0.0:
        raise GrainBoundaryError(
            ErrorCode.GB_INVALID_PARAMETER,
            "GB recovery needs a positive hardening coefficient (c_s = 0, zeta_s > 0)"
        )
    dG = np.asarray(dG, dtype=float)
    norm = np.linalg.norm(dG, axis=-1)
    M = (p.c_s * dG + state.M) / (1.0 + p.zeta_s * norm)[..., None]
    if p.zeta_s > 0.0:
        D_inc = (p.zeta_s / p.c_s) * norm * np.sum(M * M, axis=-1)
    else:
        D_inc = np.zeros(norm.shape)
    new = GbState(M=M, G_cum=state.G_cum + norm, D_acc=state.D_acc + D_inc)
    return new, D_inc


def gb_traction(orient: GbOrientation, M, grain: str, alpha: int):
    """Reduced contraction (M·s_I^a) c_I^a for grain 'A' or 'B'."""
    side = {"A": 0, "B": 1}[grain]
    return np.sum(np.asarray(M) * orient.s[..., side, alpha, :], axis=-1) * orient.c[..., side, alpha]


def gb_tractions(orient: GbOrientation, M) -> np.ndarray:
    """All tractions at once, shape (..., 2, k)."""
    return np.einsum('...q,...iaq->...ia', np.asarray(M), orient.s) * orient.c


def gb_stress_tangent(M_new, orient: GbOrientation, dG, p: GbMaterialParams) -> np.ndarray:
    """
    dM/d dgamma_J^b, shape (..., 2, k, 2) indexed [side J, system b, component].

    The orientation may carry leading axes that broadcast against ``dG``.
    The recovery term is dropped where |dG| = 0.
    """
    dG = np.asarray(dG, dtype=float)
    V = orient.V
    norm = np.linalg.norm(dG, axis=-1)
    denom = 1.0 + p.zeta_s * norm
    tangent = p.c_s * V * np.ones(dG.shape[:-1] + (1, 1, 1))
    if p.zeta_s > 0.0:
        safe = np.where(norm > 0.0, norm, 1.0)
        dnorm = np.where((norm > 0.0)[..., None, None],
                         np.einsum('...q,...jbq->...jb', dG, V) / safe[..., None, None], 0.0)
        tangent = tangent - p.zeta_s * dnorm[..., None] * np.asarray(M_new)[..., None, None, :]
    return tangent / denom[..., None, None, None]


def gb_defect_energy(state: GbState, p: GbMaterialParams):
    """M·M / (2 c_s); zero for a micro-free boundary."""
    if p.c_s == 0.0:
        return np.zeros(state.M.shape[:-1])
    return np.sum(state.M * state.M, axis=-1) / (2.0 * p.c_s)


def audit_gb_dissipation(increment, scale: float = 1.0):
    """Raise if a GB dissipation increment is negative beyond round-off."""
    try:
        return audit_dissipation(increment, scale, ErrorCode.GB_NEGATIVE_DISSIPATION)
    except MaterialError as e:
        raise GrainBoundaryError(ErrorCode.GB_NEGATIVE_DISSIPATION, e.message)
