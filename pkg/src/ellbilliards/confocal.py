"""Geometry of a family of confocal conics.

The family is anchored at the caustic ``c`` with semiaxes ``(a_c, b_c)``:

    x**2 / (a_c**2 + k) + y**2 / (b_c**2 + k) = 1

Ellipses have ``k > -b_c**2``, hyperbolas ``-a_c**2 < k < -b_c**2``.
Points on an ellipse are parametrized as ``(a_e cos t, b_e sin t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .ellipfn import Modulus, complete_K
from .exceptions import DomainError

#: Absolute tolerance for geometric predicates, scaled by max(1, a_c**2).
GEOM_TOL = 1e-10


@dataclass(frozen=True)
class ConfocalFamily:
    """Confocal family determined by the caustic semiaxes.

    ``b_c == a_c`` (a circle, ``m = 0``) is accepted as a degenerate
    family; it is handy as a sanity limit.
    """

    a_c: float
    b_c: float

    def __post_init__(self):
        if not (self.a_c > 0 and self.b_c > 0):
            raise DomainError("caustic semiaxes must be positive")
        if self.b_c > self.a_c:
            raise DomainError(f"need b_c <= a_c, got a_c={self.a_c}, b_c={self.b_c}")

    @cached_property
    def d(self) -> float:
        """Linear eccentricity."""
        return math.sqrt((self.a_c - self.b_c) * (self.a_c + self.b_c))

    @cached_property
    def modulus(self) -> Modulus:
        return Modulus(self.d / self.a_c)

    @property
    def m(self) -> float:
        return self.modulus.m

    @cached_property
    def K(self) -> float:
        return complete_K(self.modulus)

    @property
    def tol(self) -> float:
        return GEOM_TOL * max(1.0, self.a_c ** 2)

    def ellipse(self, k_e: float) -> "ConfocalEllipse":
        return ConfocalEllipse.from_k(k_e, self)

    @property
    def caustic(self) -> "ConfocalEllipse":
        return ConfocalEllipse.from_k(0.0, self)


@dataclass(frozen=True)
class ConfocalEllipse:
    """Member ``k = k_e`` of the family.

    ``k_e = inf`` stands for the line at infinity (the limit of the family).
    """

    k_e: float
    a_e: float
    b_e: float

    @classmethod
    def from_k(cls, k_e: float, fam: ConfocalFamily) -> "ConfocalEllipse":
        if math.isinf(k_e) and k_e > 0:
            return cls(math.inf, math.inf, math.inf)
        if k_e < -fam.b_c ** 2:
            raise DomainError(f"k_e={k_e} does not describe an ellipse")
        return cls(k_e, math.sqrt(fam.a_c ** 2 + k_e), math.sqrt(fam.b_c ** 2 + k_e))

    @classmethod
    def from_semiaxes(cls, a_e: float, b_e: float, fam: ConfocalFamily) -> "ConfocalEllipse":
        # k_e from the minor axis; the major axis is then implied
        return cls.from_k(b_e ** 2 - fam.b_c ** 2, fam)

    @property
    def at_infinity(self) -> bool:
        return math.isinf(self.k_e)

    def residual(self, p) -> float:
        """``x**2/a_e**2 + y**2/b_e**2 - 1`` at point ``p``."""
        x, y = p
        return (x / self.a_e) ** 2 + (y / self.b_e) ** 2 - 1.0


@dataclass(frozen=True)
class ConfocalHyperbola:
    k_h: float
    a_h: float
    b_h: float


class EllipticCoords(NamedTuple):
    """Elliptic coordinates ``(k_e, k_h)`` of a point.

    ``on_axis`` flags the boundary cases ``k_h in {-a_c**2, -b_c**2}``.
    """

    k_e: float
    k_h: float
    on_axis: bool = False


def elliptic_from_cartesian(p, fam: ConfocalFamily) -> EllipticCoords:
    """Roots ``k_e >= k_h`` of the confocal quadratic through ``p``.

    Raises :class:`DomainError` for points strictly inside the caustic.
    """
    x, y = float(p[0]), float(p[1])
    a2, b2 = fam.a_c ** 2, fam.b_c ** 2
    B = a2 + b2 - x * x - y * y
    C = a2 * b2 - b2 * x * x - a2 * y * y
    # B**2 - 4C rewritten as a sum of squares
    disc = (fam.d ** 2 - x * x + y * y) ** 2 + 4.0 * x * x * y * y
    root = math.sqrt(disc)
    # stable pair of roots
    q = -0.5 * (B + math.copysign(root, B))
    if q == 0.0:
        r1 = r2 = 0.0
    else:
        r1, r2 = q, C / q
    k_e, k_h = max(r1, r2), min(r1, r2)
    if k_e < -fam.tol:
        raise DomainError(f"point {(x, y)} lies inside the caustic (k_e={k_e})")
    k_e = max(k_e, 0.0)
    # clamp rounding overshoot to the band
    k_h = min(max(k_h, -a2), -b2)
    on_axis = abs(x) <= fam.tol or abs(y) <= fam.tol
    return EllipticCoords(k_e, k_h, on_axis)


def cartesian_from_elliptic(c: EllipticCoords, signs, fam: ConfocalFamily) -> np.ndarray:
    """Point with elliptic coordinates ``c`` in the quadrant given by ``signs``.

    ``signs`` is a pair of +1/-1 for the x and y components; the
    coordinates only determine the squares.
    """
    k_e, k_h = c[0], c[1]
    a2, b2 = fam.a_c ** 2, fam.b_c ** 2
    tol = fam.tol
    if not (-a2 - tol <= k_h <= -b2 + tol and k_e >= -tol):
        raise DomainError(f"(k_e, k_h)=({k_e}, {k_h}) violates the band condition")
    d2 = fam.d ** 2
    x2 = max((a2 + k_e) * (a2 + k_h) / d2, 0.0)
    y2 = max(-(b2 + k_e) * (b2 + k_h) / d2, 0.0)
    sx, sy = signs
    return np.array([math.copysign(math.sqrt(x2), sx), math.copysign(math.sqrt(y2), sy)])


def tangent_c(t: float, fam: ConfocalFamily) -> np.ndarray:
    return np.array([-fam.a_c * math.sin(t), fam.b_c * math.cos(t)])


def norm_tc(t: float, fam: ConfocalFamily) -> float:
    """``||t_c(t)|| = sqrt(-k_h(t))``."""
    return math.hypot(fam.a_c * math.sin(t), fam.b_c * math.cos(t))


def k_h_of_t(t: float, fam: ConfocalFamily) -> float:
    """Hyperbola coordinate shared by all ellipse points with parameter ``t``."""
    s, c = math.sin(t), math.cos(t)
    return -(fam.a_c ** 2 * s * s + fam.b_c ** 2 * c * c)


def point_and_tangents(t: float, ell: ConfocalEllipse, fam: ConfocalFamily):
    """Point ``P(t)`` on ``ell`` with tangents ``t_e``, ``t_c`` and ``k_h(t)``."""
    s, c = math.sin(t), math.cos(t)
    p = np.array([ell.a_e * c, ell.b_e * s])
    t_e = np.array([-ell.a_e * s, ell.b_e * c])
    return p, t_e, tangent_c(t, fam), k_h_of_t(t, fam)


class HalfAngle(NamedTuple):
    sin_sq_half: float
    tan_half: float
    sin_theta: float


def half_angle(t: float, ell: ConfocalEllipse, fam: ConfocalFamily) -> HalfAngle:
    """Exterior-angle data at the vertex ``P(t)`` of a billiard in ``ell``.

    Uses the positive branch (counter-clockwise billiard).
    """
    k_e = ell.k_e
    if not k_e > 0:
        raise DomainError("half_angle needs an ellipse strictly outside the caustic")
    k_h = k_h_of_t(t, fam)
    return HalfAngle(
        k_e / (k_e - k_h),
        math.sqrt(-k_e / k_h),
        2.0 * math.sqrt(-k_e * k_h) / (k_e - k_h),
    )


def hyperbola_from_t(t: float, fam: ConfocalFamily) -> ConfocalHyperbola:
    """Confocal hyperbola through the ellipse points with parameter ``t``.

    On the axes one semiaxis degenerates to zero.
    """
    k_h = k_h_of_t(t, fam)
    a2 = max(fam.a_c ** 2 + k_h, 0.0)
    b2 = max(-(fam.b_c ** 2 + k_h), 0.0)
    return ConfocalHyperbola(k_h, math.sqrt(a2), math.sqrt(b2))


def tangency_test(t: float, ell: ConfocalEllipse, t_prime: float, fam: ConfocalFamily) -> float:
    """Residual that vanishes iff ``P(t)`` lies on the caustic tangent at ``Q(t')``."""
    return (
        fam.b_c * ell.a_e * math.cos(t_prime) * math.cos(t)
        + fam.a_c * ell.b_e * math.sin(t_prime) * math.sin(t)
        - fam.a_c * fam.b_c
    )


def caustic_tangent_coeffs(t_prime: float, fam: ConfocalFamily) -> tuple[float, float]:
    """Coefficients ``(u, v)`` of the tangent ``u x + v y = 1`` at ``Q(t')``."""
    return math.cos(t_prime) / fam.a_c, math.sin(t_prime) / fam.b_c


def pole_of_side(t_prime: float, ell: ConfocalEllipse, fam: ConfocalFamily) -> np.ndarray:
    """Pole w.r.t. ``ell`` of the caustic tangent at ``Q(t')``."""
    u, v = caustic_tangent_coeffs(t_prime, fam)
    if not (math.isfinite(u) and math.isfinite(v)):
        raise DomainError("line through the center has no finite pole")
    return np.array([ell.a_e ** 2 * u, ell.b_e ** 2 * v])


def caustic_curvature_radius(t: float, fam: ConfocalFamily) -> float:
    """Radius of curvature of the caustic at parameter ``t``."""
    return norm_tc(t, fam) ** 3 / (fam.a_c * fam.b_c)


def ellipse_param(p, ell: ConfocalEllipse) -> float:
    """Conic parameter ``t`` of a point on ``ell``."""
    return math.atan2(p[1] / ell.b_e, p[0] / ell.a_e)
