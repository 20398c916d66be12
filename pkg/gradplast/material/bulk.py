"""
Bulk constitutive kernel.

All functions broadcast over leading axes, so the same code serves a single
material point and the full (element, gauss point) grid. Slip quantities carry
a trailing system axis ``k``; vector quantities (slip gradients, vector
microscopic stresses) carry a further trailing axis of length 2.

Three models share the kernel:

``proposed``
    Incremental vector microscopic stress with Armstrong-Frederick type
    recovery, ``xi_{n+1} = (S0 L*^2 dk_t + xi_n) / (1 + zeta |dgamma|)``.
``gurtin-energetic``
    ``xi = S0 L_en^2 k_t`` from the total gradient, no higher order dissipation.
``gurtin-dissipative``
    Energetic part as above plus a rate dependent dissipative part driven by
    the effective rate ``sqrt(gamma_dot^2 + L_d^2 |k_t_dot|^2)``.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ..core.errorhandler import ErrorCode, MaterialError
from .kinematics import ElasticLaw, SlipSet, hardening_matrix

MODELS = ("proposed", "gurtin-energetic", "gurtin-dissipative")


@dataclass(frozen=True)
class BulkMaterialParams:
    elastic: ElasticLaw
    S0: float
    d0_dot: float
    m_rate: float
    omega: float = 0.01
    Lstar: float = 0.0
    zeta: float = 0.0
    q_latent: float = 1.0
    h_self: float = 0.0
    model: str = "proposed"
    L_en: float = 0.0
    L_d: float = 0.0

    def __post_init__(self):
        checks = [
            (self.S0 > 0.0, "S0 must be positive"),
            (self.d0_dot > 0.0, "d0_dot must be positive"),
            (0.0 < self.m_rate <= 1.0, "m_rate must be in (0, 1]"),
            (self.omega > 0.0, "omega must be positive"),
            (self.Lstar >= 0.0, "Lstar must be non-negative"),
            (self.zeta >= 0.0, "zeta must be non-negative"),
            (self.L_en >= 0.0 and self.L_d >= 0.0, "Gurtin length scales must be non-negative"),
            (self.model in MODELS, f"model must be one of {MODELS}"),
        ]
        for ok, msg in checks:
            if not ok:
                raise MaterialError(ErrorCode.MAT_INVALID_PARAMETER, msg)
        if self.m_rate == 1.0 and self.omega != 1.0:
            # m = 1 is already linear, the transition point degenerates
            raise MaterialError(ErrorCode.MAT_INVALID_PARAMETER, "m_rate = 1 requires omega = 1")

    @property
    def d_star(self) -> float:
        """Rate at which the linear branch hands over to the power law."""
        m = self.m_rate
        if m == 1.0:
            return np.inf
        return (self.d0_dot / m) * (1.0 / (self.omega * m)) ** (1.0 / (m - 1.0))

    @property
    def theta_shift(self) -> float:
        if self.m_rate == 1.0:
            return 0.0
        return self.d_star * (1.0 - self.m_rate)

    @property
    def energetic_modulus(self) -> float:
        """S0 L^2 of the energetic gradient term for the selected model."""
        L = self.Lstar if self.model == "proposed" else self.L_en
        return self.S0 * L * L


def rate_sensitivity(dbar_rate, p: BulkMaterialParams):
    """
    Regularized rate-sensitivity function R.

    Linear below ``d_star``, shifted power law above it; the two branches meet
    with equal value and slope.
    """
    d = np.asarray(dbar_rate, dtype=float)
    linear = d / (p.omega * p.d0_dot)
    shifted = np.maximum(d - p.theta_shift, 0.0) / p.d0_dot
    power = shifted ** p.m_rate
    return np.where(d <= p.d_star, linear, power)


def rate_sensitivity_derivative(dbar_rate, p: BulkMaterialParams):
    d = np.asarray(dbar_rate, dtype=float)
    linear = np.full_like(d, 1.0 / (p.omega * p.d0_dot))
    shifted = np.maximum(d - p.theta_shift, p.d_star * p.m_rate if np.isfinite(p.d_star) else 1.0)
    power = (p.m_rate / p.d0_dot) * (shifted / p.d0_dot) ** (p.m_rate - 1.0)
    return np.where(d < p.d_star, linear, power)


def scalar_microstress(dgamma, S, dt: float, p: BulkMaterialParams):
    """pi = S R(|dgamma|/dt) sign(dgamma); zero slip gives zero stress."""
    dgamma = np.asarray(dgamma, dtype=float)
    return S * rate_sensitivity(np.abs(dgamma) / dt, p) * np.sign(dgamma)


def update_slip_resistance(S_old, ddbar, h_matrix):
    """S_new = S_old + h @ ddbar along the system axis."""
    return np.asarray(S_old) + np.asarray(ddbar) @ np.asarray(h_matrix).T


def update_vector_microstress(xi_old, dkappa_t, ddbar, p: BulkMaterialParams):
    """Closed-form backward-Euler update of the energetic vector microscopic stress."""
    ddbar = np.asarray(ddbar, dtype=float)
    return (p.S0 * p.Lstar ** 2 * np.asarray(dkappa_t) + xi_old) / (1.0 + p.zeta * ddbar)[..., None]


def vector_microstress_tangent_gamma(xi_new, ddbar, dgamma, p: BulkMaterialParams):
    """
    Diagonal entries d xi^a / d dgamma^a; off-diagonal entries vanish.

    Zero slip gives a zero derivative.
    """
    ddbar = np.asarray(ddbar, dtype=float)
    factor = -p.zeta * np.sign(dgamma) / (1.0 + p.zeta * ddbar)
    return factor[..., None] * xi_new


def vector_microstress_tangent_kappa(P, ddbar, p: BulkMaterialParams):
    """Diagonal blocks d xi^a / d dkappa^a = S0 L*^2 / (1 + zeta ddbar) P^a."""
    ddbar = np.asarray(ddbar, dtype=float)
    return (p.S0 * p.Lstar ** 2 / (1.0 + p.zeta * ddbar))[..., None, None] * P


def _effective_increment(dgamma, dk_t, p: BulkMaterialParams):
    return np.sqrt(dgamma ** 2 + p.L_d ** 2 * np.sum(dk_t * dk_t, axis=-1))


def _flow_factor(dd, S, dt, p: BulkMaterialParams):
    """phi = S R(dd/dt) / dd with its linear-branch limit at dd = 0."""
    safe = np.where(dd > 0.0, dd, 1.0)
    ratio = np.where(dd > 0.0, rate_sensitivity(dd / dt, p) / safe, 1.0 / (p.omega * p.d0_dot * dt))
    return S * ratio, ratio


def gurtin_dissipative_stresses(dgamma, dkappa_t, dt: float, S, p: BulkMaterialParams):
    """
    Scalar and dissipative vector microscopic stresses of the Gurtin baseline.

    Returns:
        tuple: (pi, xi_dis); both vanish when the effective increment is zero
    """
    dgamma = np.asarray(dgamma, dtype=float)
    dkappa_t = np.asarray(dkappa_t, dtype=float)
    dd = _effective_increment(dgamma, dkappa_t, p)
    phi, _ = _flow_factor(dd, S, dt, p)
    pi = phi * dgamma
    xi_dis = p.L_d ** 2 * phi[..., None] * dkappa_t
    return pi, xi_dis


def higher_order_dissipation(xi, ddbar, p: BulkMaterialParams, dkappa_t=None):
    """
    Dissipation of the vector microscopic stress over one step.

    ``proposed``: recovery part ``zeta ddbar xi·xi / (S0 L*^2)``.
    ``gurtin-dissipative``: ``xi_dis · dk_t`` with ``xi`` the dissipative
    stress and ``dkappa_t`` the tangential gradient increment.
    ``gurtin-energetic``: zero.
    """
    xi = np.asarray(xi, dtype=float)
    batch = xi.shape[:-2]
    if p.model == "gurtin-dissipative":
        if dkappa_t is None:
            return np.zeros(batch)
        return np.sum(xi * np.asarray(dkappa_t, dtype=float), axis=(-2, -1))
    if p.model == "proposed" and p.zeta > 0.0 and p.Lstar > 0.0:
        return np.sum(p.zeta * np.asarray(ddbar) * np.sum(xi * xi, axis=-1), axis=-1) / (p.S0 * p.Lstar ** 2)
    return np.zeros(batch)


def dissipation_increment(pi, dgamma, xi, ddbar, p: BulkMaterialParams, tol_scale: float = 1.0,
                          dkappa_t=None):
    """
    Bulk dissipation of one step.

    Sums ``pi dgamma`` over the system axis and adds
    :func:`higher_order_dissipation`.

    Raises:
        MaterialError: If any increment is negative beyond round-off
    """
    D = np.sum(np.asarray(pi) * dgamma, axis=-1) + higher_order_dissipation(xi, ddbar, p, dkappa_t)
    audit_dissipation(D, tol_scale)
    return D


def audit_dissipation(increment, scale: float = 1.0, error_code=ErrorCode.MAT_NEGATIVE_DISSIPATION):
    """Raise if a dissipation increment is negative beyond ``1e-12 * scale``."""
    increment = np.asarray(increment)
    if increment.size and np.min(increment) < -1e-12 * scale:
        worst = int(np.argmin(increment))
        raise MaterialError(
            error_code,
            f"Negative dissipation increment {float(increment.flat[worst]):.3e} at point {worst}"
        )
    return True


def defect_energy_density(xi, p: BulkMaterialParams, modulus: Optional[float] = None):
    """
    Defect energy sum(xi·xi) / (2 S0 L^2) over the system axis.

    Raises:
        MaterialError: Nonzero xi with a zero length scale
    """
    xi = np.asarray(xi, dtype=float)
    modulus = p.energetic_modulus if modulus is None else modulus
    sq = np.sum(xi * xi, axis=(-2, -1))
    if modulus == 0.0:
        if np.any(sq > 0.0):
            raise MaterialError(
                ErrorCode.MAT_INCONSISTENT_STATE,
                "Nonzero vector microscopic stress with zero energetic length scale"
            )
        return np.zeros_like(sq)
    return sq / (2.0 * modulus)


@dataclass
class BulkState:
    """
    History of a batch of material points.

    Shapes for a batch of shape ``B`` and ``k`` slip systems: ``xi`` and
    ``xi_dis`` (B, k, 2); ``S``, ``dbar`` and ``rho_dis`` (B, k); the
    accumulators ``D_acc``, ``Dh_acc`` and ``Wdef`` (B,).
    """
    xi: np.ndarray
    xi_dis: np.ndarray
    S: np.ndarray
    dbar: np.ndarray
    rho_dis: np.ndarray
    D_acc: np.ndarray
    Dh_acc: np.ndarray
    Wdef: np.ndarray

    @classmethod
    def virgin(cls, shape, k: int, S0: float) -> "BulkState":
        shape = tuple(np.atleast_1d(shape))
        return cls(
            xi=np.zeros(shape + (k, 2)),
            xi_dis=np.zeros(shape + (k, 2)),
            S=np.full(shape + (k,), float(S0)),
            dbar=np.zeros(shape + (k,)),
            rho_dis=np.zeros(shape + (k,)),
            D_acc=np.zeros(shape),
            Dh_acc=np.zeros(shape),
            Wdef=np.zeros(shape),
        )

    def copy(self) -> "BulkState":
        return replace(self, **{name: value.copy() for name, value in vars(self).items()})

    def energetic_density(self, slips_s, p: BulkMaterialParams):
        """Energetic edge density −s·xi / (S0 L^2), zero for a zero length scale."""
        modulus = p.energetic_modulus
        if modulus == 0.0:
            return np.zeros(self.S.shape)
        return -np.sum(self.xi * slips_s, axis=-1) / modulus


@dataclass
class BulkResponse:
    """
    Stresses and consistent tangents at a batch of points.

    Tangent layout (system indices a, b; vector indices q, r):
    ``dpi_dgamma[..., a, b]``, ``dpi_dkappa[..., a, b, r]``,
    ``dxi_dgamma[..., a, q, b]``, ``dxi_dkappa[..., a, q, b, r]``.
    """
    pi: np.ndarray
    xi: np.ndarray
    dpi_dgamma: np.ndarray
    dpi_dkappa: np.ndarray
    dxi_dgamma: np.ndarray
    dxi_dkappa: np.ndarray
    state: BulkState
    D_inc: np.ndarray
    Dh_inc: np.ndarray


def update_bulk(state: BulkState, dgamma, kappa, dkappa, slips: SlipSet,
                p: BulkMaterialParams, dt: float) -> BulkResponse:
    """
    Material update of one step from the committed ``state``.

    Args:
        state: Committed history (not modified)
        dgamma: (B, k) slip increments
        kappa: (B, k, 2) total slip gradients at the end of the step
        dkappa: (B, k, 2) slip gradient increments
        slips: Slip systems of the grain
        p: Material parameters
        dt: Step size

    Returns:
        BulkResponse: Stresses, tangents, trial state and dissipation increments
    """
    if not dt > 0.0:
        raise MaterialError(ErrorCode.MAT_INVALID_PARAMETER, f"Step size must be positive: {dt}")
    dgamma = np.asarray(dgamma, dtype=float)
    batch = dgamma.shape[:-1]
    k = slips.k
    P = slips.P
    s = slips.s
    h_mat = hardening_matrix(slips, p.h_self, p.q_latent)
    eye = np.eye(k)
    dk_t = np.einsum('aqr,...ar->...aq', P, dkappa)
    new = state.copy()

    if p.model == "gurtin-dissipative":
        resp = _update_gurtin_dissipative(state, new, dgamma, kappa, dk_t, P, h_mat, p, dt)
    else:
        ddbar = np.abs(dgamma)
        sgn = np.sign(dgamma)
        new.S = update_slip_resistance(state.S, ddbar, h_mat)
        new.dbar = state.dbar + ddbar
        rate = ddbar / dt
        R = rate_sensitivity(rate, p)
        dR = rate_sensitivity_derivative(rate, p)
        pi = scalar_microstress(dgamma, new.S, dt, p)
        dpi_dgamma = (R * sgn)[..., :, None] * h_mat * sgn[..., None, :] \
            + eye * (new.S * dR / dt)[..., None]
        dpi_dkappa = np.zeros(batch + (k, k, 2))
        dxi_dgamma = np.zeros(batch + (k, 2, k))
        dxi_dkappa = np.zeros(batch + (k, 2, k, 2))
        idx = np.arange(k)

        if p.model == "proposed":
            new.xi = update_vector_microstress(state.xi, dk_t, ddbar, p)
            dxi_dgamma[..., idx, :, idx] = np.moveaxis(
                vector_microstress_tangent_gamma(new.xi, ddbar, dgamma, p), -2, 0)
            dxi_dkappa[..., idx, :, idx, :] = np.moveaxis(
                vector_microstress_tangent_kappa(P, ddbar, p), -3, 0)
            rho_en = new.energetic_density(s, p)
            if p.Lstar > 0.0:
                new.rho_dis = state.rho_dis + p.zeta * ddbar * rho_en
            else:
                new.rho_dis = state.rho_dis - np.sum(dkappa * s, axis=-1)
        else:
            modulus = p.energetic_modulus
            new.xi = modulus * np.einsum('aqr,...ar->...aq', P, kappa)
            dxi_dkappa[..., idx, :, idx, :] = np.moveaxis(
                np.broadcast_to(modulus * P, batch + (k, 2, 2)), -3, 0)

        Dh = higher_order_dissipation(new.xi, ddbar, p)
        D = dissipation_increment(pi, dgamma, new.xi, ddbar, p)
        resp = BulkResponse(pi=pi, xi=new.xi.copy(), dpi_dgamma=dpi_dgamma, dpi_dkappa=dpi_dkappa,
                            dxi_dgamma=dxi_dgamma, dxi_dkappa=dxi_dkappa, state=new,
                            D_inc=D, Dh_inc=Dh)

    if p.model != "proposed" and p.energetic_modulus == 0.0:
        # no energetic store: the whole gradient is booked as dissipative density
        new.rho_dis = state.rho_dis - np.sum(dkappa * s, axis=-1)

    new.D_acc = state.D_acc + resp.D_inc
    new.Dh_acc = state.Dh_acc + resp.Dh_inc
    new.Wdef = defect_energy_density(new.xi, p)
    return resp


def _update_gurtin_dissipative(state, new, dgamma, kappa, dk_t, P, h_mat, p, dt):
    batch = dgamma.shape[:-1]
    k = dgamma.shape[-1]
    eye = np.eye(k)
    idx = np.arange(k)
    Ld2 = p.L_d ** 2

    dd = _effective_increment(dgamma, dk_t, p)
    positive = dd > 0.0
    safe_dd = np.where(positive, dd, 1.0)
    # d dd / d dgamma and d dd / d dkappa (diagonal in the system index)
    ddd_dg = np.where(positive, dgamma / safe_dd, 0.0)
    ddd_dk = np.where(positive[..., None], Ld2 * dk_t / safe_dd[..., None], 0.0)

    new.S = update_slip_resistance(state.S, dd, h_mat)
    new.dbar = state.dbar + dd
    phi, ratio = _flow_factor(dd, new.S, dt, p)
    R = rate_sensitivity(dd / dt, p)
    dR = rate_sensitivity_derivative(dd / dt, p)
    dphi_ddd = np.where(positive, new.S * (dR / dt * dd - R) / safe_dd ** 2, 0.0)

    # dS_a / dx_b through the hardening matrix
    dS_dg = h_mat * ddd_dg[..., None, :]
    dS_dk = h_mat[..., None] * ddd_dk[..., None, :, :]
    dphi_dg = eye * (dphi_ddd * ddd_dg)[..., None] + ratio[..., None] * dS_dg
    dphi_dk = eye[..., None] * (dphi_ddd[..., None] * ddd_dk)[..., None, :] \
        + ratio[..., None, None] * dS_dk

    pi, xi_dis = gurtin_dissipative_stresses(dgamma, dk_t, dt, new.S, p)
    modulus = p.energetic_modulus
    new.xi = modulus * np.einsum('aqr,...ar->...aq', P, kappa)
    new.xi_dis = xi_dis

    dpi_dgamma = eye * phi[..., None] + dgamma[..., None] * dphi_dg
    dpi_dkappa = dgamma[..., None, None] * dphi_dk
    dxi_dgamma = Ld2 * dk_t[..., :, :, None] * dphi_dg[..., :, None, :]
    dxi_dkappa = Ld2 * dk_t[..., :, :, None, None] * dphi_dk[..., :, None, :, :]
    diag = (modulus + Ld2 * phi)[..., None, None] * P
    dxi_dkappa[..., idx, :, idx, :] += np.moveaxis(diag, -3, 0)

    Dh = higher_order_dissipation(xi_dis, dd, p, dk_t)
    D = dissipation_increment(pi, dgamma, xi_dis, dd, p, dkappa_t=dk_t)
    return BulkResponse(pi=pi, xi=new.xi + xi_dis, dpi_dgamma=dpi_dgamma, dpi_dkappa=dpi_dkappa,
                        dxi_dgamma=dxi_dgamma, dxi_dkappa=dxi_dkappa, state=new,
                        D_inc=D, Dh_inc=Dh)
