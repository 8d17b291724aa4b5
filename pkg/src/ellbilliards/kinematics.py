"""Billiard motion: velocity field, vertex speeds and rate formulas.

The canonical parameter ``u`` is normalized so that the motion constant
``v_t * tan(theta/2)**2`` equals ``k_e``; ``u_tilde = a_c * u`` is the
argument of the Jacobi functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .billiard import Billiard, BilliardConfig, build_billiard, exterior_angles, conic_param
from .confocal import (
    ConfocalEllipse,
    ConfocalFamily,
    EllipticCoords,
    cartesian_from_elliptic,
    half_angle,
    k_h_of_t,
    norm_tc,
    point_and_tangents,
)
from .ellipfn import jacobi_sncndn
from .exceptions import DomainError, IntegrationError

FD_STEP = 1e-5


class CanonicalParam(NamedTuple):
    u_tilde: float
    u: float

    @classmethod
    def from_tilde(cls, u_tilde: float, fam: ConfocalFamily) -> "CanonicalParam":
        return cls(u_tilde, u_tilde / fam.a_c)


def velocity_field(t: float, ell: ConfocalEllipse, fam: ConfocalFamily) -> np.ndarray:
    """Velocity ``||t_c(t)|| * t_e(t)`` of the point ``P(t)`` on ``ell``."""
    _, t_e, _, k_h = point_and_tangents(t, ell, fam)
    return math.sqrt(-k_h) * t_e


def velocity_field_elliptic(k_e: float, k_h: float, fam: ConfocalFamily, h: Optional[float] = None) -> np.ndarray:
    """The same field written in elliptic coordinates (first quadrant).

    ``-2 sqrt(k_h (a_c^2 + k_h)(b_c^2 + k_h)) * dX/dk_h``.  ``dX/dk_h`` is
    exact by default; pass ``h`` to take it by central differences instead.
    """
    a2, b2 = fam.a_c ** 2, fam.b_c ** 2
    if h is None:
        x, y = cartesian_from_elliptic((k_e, k_h), (1, 1), fam)
        dX = np.array([x / (2.0 * (a2 + k_h)), y / (2.0 * (b2 + k_h))])
    else:
        plus = cartesian_from_elliptic((k_e, k_h + h), (1, 1), fam)
        minus = cartesian_from_elliptic((k_e, k_h - h), (1, 1), fam)
        dX = (plus - minus) / (2.0 * h)
    return -2.0 * math.sqrt(k_h * (a2 + k_h) * (b2 + k_h)) * dX


class VertexSpeeds(NamedTuple):
    v_t: float
    v_n: float
    v: float


def vertex_speeds(t: float, ell: ConfocalEllipse, fam: ConfocalFamily) -> VertexSpeeds:
    """Tangential, normal and total speed of a vertex at parameter ``t``."""
    if not ell.k_e > 0:
        raise DomainError("vertex speeds need k_e > 0")
    k_h = k_h_of_t(t, fam)
    return VertexSpeeds(-k_h, math.sqrt(-ell.k_e * k_h), math.sqrt(k_h * (k_h - ell.k_e)))


def omega_of_side(t_prime: float, fam: ConfocalFamily) -> float:
    """Angular velocity of the side touching the caustic at ``Q(t')``."""
    return fam.a_c * fam.b_c / norm_tc(t_prime, fam)


@dataclass(frozen=True)
class KinematicState:
    """Per-vertex speeds and angles, per-side angular velocities."""

    v_t: np.ndarray
    v_n: np.ndarray
    v: np.ndarray
    theta: np.ndarray
    omega: np.ndarray
    C: np.ndarray


def kinematic_state(bil: Billiard) -> KinematicState:
    """Speeds from the closed forms; ``theta`` and ``C`` from the polygon."""
    ell, fam = bil.ellipse, bil.fam
    speeds = np.array([vertex_speeds(t, ell, fam) for t in bil.vertex_t])
    theta = exterior_angles(bil)
    omega = np.array([omega_of_side(t, fam) for t in bil.contact_t])
    C = speeds[:, 0] * np.tan(0.5 * theta) ** 2
    return KinematicState(speeds[:, 0], speeds[:, 1], speeds[:, 2], theta, omega, C)


def _prev_contact_t(bil: Billiard, i: int) -> float:
    if i > 0:
        return bil.contact_t[i - 1]
    if bil.is_closed:
        return bil.contact_t[-1]
    return conic_param(bil.vertex_u[0] - bil.config.delta_u, bil.fam)


def theta_rate(bil: Billiard, i: int) -> float:
    """``d theta_i / du = omega_i - omega_{i-1}``."""
    fam = bil.fam
    return fam.a_c * fam.b_c * (1.0 / norm_tc(bil.contact_t[i], fam) - 1.0 / norm_tc(_prev_contact_t(bil, i), fam))


def side_length_rate(bil: Billiard, i: int) -> float:
    """``d |P_i P_{i+1}| / du = d^2 (sin^2 t_{i+1} - sin^2 t_i)``."""
    t_next = bil.vertex_t[(i + 1) % bil.count] if bil.is_closed or i + 1 < bil.count else conic_param(
        bil.vertex_u[i] + 2.0 * bil.config.delta_u, bil.fam
    )
    return bil.fam.d ** 2 * (math.sin(t_next) ** 2 - math.sin(bil.vertex_t[i]) ** 2)


def half_angle_sum(bil: Billiard, i: int):
    """Both sides of ``1/||t_c(t'_{i-1})|| + 1/||t_c(t'_i)|| = a_e b_e sin(theta_i) / (a_c b_c sqrt(k_e))``."""
    fam, ell = bil.fam, bil.ellipse
    lhs = 1.0 / norm_tc(_prev_contact_t(bil, i), fam) + 1.0 / norm_tc(bil.contact_t[i], fam)
    sin_theta = half_angle(bil.vertex_t[i], ell, fam).sin_theta
    rhs = ell.a_e * ell.b_e * sin_theta / (fam.a_c * fam.b_c * math.sqrt(ell.k_e))
    return lhs, rhs


def motion_derivative(cfg: BilliardConfig, quantity, h: float = FD_STEP) -> float:
    """Central difference in ``u`` of ``quantity(billiard)`` along the motion."""
    shift = cfg.fam.a_c * h
    plus = quantity(build_billiard(cfg.with_u0(cfg.u0 + shift)))
    minus = quantity(build_billiard(cfg.with_u0(cfg.u0 - shift)))
    return (plus - minus) / (2.0 * h)


def integrate_flow(t0: float, delta_canonical: float, fam: ConfocalFamily, tol: float = 1e-10) -> float:
    """Integrate ``dt/du = sqrt(a_c^2 sin^2 t + b_c^2 cos^2 t)`` over ``delta_canonical``.

    Embedded Runge-Kutta 4(5) with adaptive steps; ``tol`` bounds the
    absolute local error.
    """
    if not tol > 0:
        raise DomainError("tolerance must be positive")
    if delta_canonical == 0.0:
        return float(t0)

    def rhs(_u, y):
        return [norm_tc(y[0], fam)]

    sol = solve_ivp(rhs, (0.0, delta_canonical), [t0], method="RK45", rtol=tol, atol=tol)
    if not sol.success:
        raise IntegrationError(sol.message)
    return float(sol.y[0, -1])


def elliptic_coords_canonical(u_tilde: float, delta_u: float, fam: ConfocalFamily) -> EllipticCoords:
    """``(k_e, k_h)`` of the point with canonical parameter ``u_tilde`` on the
    ellipse belonging to ``delta_u``."""
    if not (0.0 < delta_u < fam.K):
        raise DomainError(f"delta_u must lie in (0, K), got {delta_u}")
    mod = fam.modulus
    sn_d, cn_d, _ = jacobi_sncndn(delta_u, mod)
    k_e = (fam.a_c * mod.m_comp * sn_d / cn_d) ** 2
    k_h = -((fam.a_c * jacobi_sncndn(u_tilde, mod).dn) ** 2)
    return EllipticCoords(k_e, k_h)


def k_h_rate(k_h: float, fam: ConfocalFamily) -> float:
    """Magnitude ``2 sqrt(k_h (a_c^2 + k_h)(b_c^2 + k_h))`` of ``dk_h/du``."""
    return 2.0 * math.sqrt(max(k_h * (fam.a_c ** 2 + k_h) * (fam.b_c ** 2 + k_h), 0.0))
