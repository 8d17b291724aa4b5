"""Billiards in an ellipse with a confocal ellipse as caustic.

Vertices are placed with the canonical parametrization

    P(u) = (-a_e sn u, b_e cn u),    Q(u) = (-a_c sn u, b_c cn u)

where consecutive vertices differ by ``2 * delta_u`` and the contact point
of side ``P_i P_{i+1}`` sits halfway, at ``u_i + delta_u``.  A purely
geometric reflection construction is provided as an independent check.

Indices are 0-based: ``vertices[0]`` is ``P_1``, ``contacts[0]`` is ``Q_1``
(on side ``P_1 P_2``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional, Union

import numpy as np

from .confocal import (
    ConfocalEllipse,
    ConfocalFamily,
    norm_tc,
)
from .ellipfn import incomplete_F, jacobi_am, jacobi_sncndn
from .exceptions import ConfigError, DomainError, GeometryError

# |cn| below this is treated as a point/ellipse at infinity
_INF_CN = 1e-12
# relative cross product below this counts as parallel lines
_PARALLEL_TOL = 1e-10


@dataclass(frozen=True)
class PointAtInfinity:
    """Ideal point in the given (unit) direction."""

    direction: np.ndarray = field(compare=False)

    @property
    def at_infinity(self) -> bool:
        return True


GridPoint = Union[np.ndarray, PointAtInfinity]


def is_at_infinity(p) -> bool:
    return isinstance(p, PointAtInfinity)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BilliardConfig:
    """Shift, start and (optional) periodicity data of a billiard.

    Parameters
    ----------
    fam : ConfocalFamily
        Caustic and its confocal family.
    delta_u : float
        Canonical half-shift; vertices advance by ``2 * delta_u``.
    u0 : float
        Canonical parameter of the first vertex.
    N, tau : int, optional
        Period and turning number when the billiard is periodic.
    """

    fam: ConfocalFamily
    delta_u: float
    u0: float = 0.0
    N: Optional[int] = None
    tau: Optional[int] = None

    def __post_init__(self):
        K = self.fam.K
        if not (0.0 < self.delta_u < K):
            raise DomainError(f"delta_u must lie in (0, K={K}), got {self.delta_u}")
        if (self.N is None) != (self.tau is None):
            raise ConfigError("N and tau must be given together")
        if self.N is not None:
            _check_period(self.N, self.tau)
            expected = 2.0 * self.tau * K / self.N
            if abs(expected - self.delta_u) > 1e-12 * max(1.0, K):
                raise ConfigError(
                    f"delta_u={self.delta_u} does not match 2*tau*K/N={expected}"
                )

    @classmethod
    def periodic(cls, fam: ConfocalFamily, N: int, tau: int = 1, u0: float = 0.0):
        _check_period(N, tau)
        return cls(fam, 2.0 * tau * fam.K / N, u0, N, tau)

    @property
    def is_periodic(self) -> bool:
        return self.N is not None

    @property
    def ellipse(self) -> ConfocalEllipse:
        return ellipse_from_delta(self.delta_u, self.fam)

    def with_u0(self, u0: float) -> "BilliardConfig":
        return replace(self, u0=u0)


def _check_period(N: int, tau: int) -> None:
    if N < 3:
        raise ConfigError(f"period N must be >= 3, got {N}")
    if tau < 1:
        raise ConfigError(f"turning number must be >= 1, got {tau}")
    if math.gcd(N, tau) != 1:
        raise ConfigError(f"gcd(N, tau) must be 1, got N={N}, tau={tau}")
    if 2 * tau >= N:
        raise DomainError(f"need tau < N/2 (delta_u < K), got N={N}, tau={tau}")


# ---------------------------------------------------------------------------
# ellipse <-> shift
# ---------------------------------------------------------------------------


def ellipse_from_delta(delta_u: float, fam: ConfocalFamily) -> ConfocalEllipse:
    """Confocal ellipse whose billiards have half-shift ``delta_u``.

    Semiaxes ``a_c dn/|cn|`` and ``b_c/|cn|``; ``cn = 0`` gives the line at
    infinity.
    """
    sn_, cn_, dn_ = jacobi_sncndn(delta_u, fam.modulus)
    if abs(cn_) < _INF_CN:
        return ConfocalEllipse(math.inf, math.inf, math.inf)
    m_comp = fam.modulus.m_comp
    k_e = (fam.a_c * m_comp * sn_ / cn_) ** 2
    return ConfocalEllipse(k_e, fam.a_c * dn_ / abs(cn_), fam.b_c / abs(cn_))


def ellipse_for_period(N: int, tau: int, fam: ConfocalFamily):
    """Half-shift and circumscribed ellipse of ``N``-periodic billiards
    with turning number ``tau``."""
    _check_period(N, tau)
    delta_u = 2.0 * tau * fam.K / N
    return delta_u, ellipse_from_delta(delta_u, fam)


def delta_from_ellipse(ell: ConfocalEllipse, fam: ConfocalFamily) -> float:
    """Unique ``delta_u`` in ``(0, K)`` with ``cn(delta_u) = b_c / b_e``."""
    if not ell.b_e > fam.b_c:
        raise DomainError("ellipse must lie strictly outside the caustic")
    if math.isinf(ell.b_e):
        return fam.K
    return incomplete_F(math.acos(fam.b_c / ell.b_e), fam.modulus)


# ---------------------------------------------------------------------------
# canonical construction
# ---------------------------------------------------------------------------


def conic_param(u_tilde: float, fam: ConfocalFamily) -> float:
    """Conic parameter ``t = pi/2 + am(u)`` of canonical parameter ``u``."""
    return 0.5 * math.pi + jacobi_am(u_tilde, fam.modulus)


def canonical_point(u_tilde: float, ell: ConfocalEllipse, fam: ConfocalFamily) -> np.ndarray:
    sn_, cn_, _ = jacobi_sncndn(u_tilde, fam.modulus)
    return np.array([-ell.a_e * sn_, ell.b_e * cn_])


@dataclass(frozen=True, eq=False)
class Billiard:
    """A finite stretch of a billiard (the full period when periodic).

    ``prev_contact`` is ``Q_0`` (on the side entering ``P_1``) and
    ``next_vertex`` is ``P_{count+1}``; for a periodic billiard these close
    the polygon.
    """

    config: BilliardConfig
    ellipse: ConfocalEllipse
    vertex_u: np.ndarray
    vertex_t: np.ndarray
    vertices: np.ndarray
    contact_u: np.ndarray
    contact_t: np.ndarray
    contacts: np.ndarray
    prev_contact: np.ndarray
    next_vertex: np.ndarray

    @property
    def fam(self) -> ConfocalFamily:
        return self.config.fam

    @property
    def count(self) -> int:
        return len(self.vertices)

    @property
    def is_closed(self) -> bool:
        return self.config.is_periodic and self.count == self.config.N

    @property
    def k_e(self) -> float:
        return self.ellipse.k_e

    def side_endpoints(self):
        """Arrays ``(P_i, P_{i+1})`` for every side."""
        starts = self.vertices
        ends = np.vstack([self.vertices[1:], self.next_vertex[None, :]])
        return starts, ends

    def side_lengths(self) -> np.ndarray:
        starts, ends = self.side_endpoints()
        return np.hypot(*(ends - starts).T)

    @property
    def perimeter(self) -> float:
        return float(self.side_lengths().sum())

    def closure_residual(self) -> float:
        """Distance between ``P_{count+1}`` and ``P_1``."""
        return float(np.hypot(*(self.next_vertex - self.vertices[0])))


def build_billiard(cfg: BilliardConfig, count: Optional[int] = None) -> Billiard:
    """Canonical billiard with vertices at ``u0 + 2k delta_u``.

    ``count`` defaults to the period for periodic configurations.
    """
    if count is None:
        if not cfg.is_periodic:
            raise ConfigError("count is required for non-periodic configurations")
        count = cfg.N
    if count < 1:
        raise ConfigError("count must be positive")
    fam, du = cfg.fam, cfg.delta_u
    ell = cfg.ellipse
    caustic = fam.caustic
    k = np.arange(count)
    vu = cfg.u0 + 2.0 * du * k
    cu = vu + du
    vertices = np.array([canonical_point(u, ell, fam) for u in vu])
    contacts = np.array([canonical_point(u, caustic, fam) for u in cu])
    return Billiard(
        config=cfg,
        ellipse=ell,
        vertex_u=vu,
        vertex_t=np.array([conic_param(u, fam) for u in vu]),
        vertices=vertices,
        contact_u=cu,
        contact_t=np.array([conic_param(u, fam) for u in cu]),
        contacts=contacts,
        prev_contact=canonical_point(cfg.u0 - du, caustic, fam),
        next_vertex=canonical_point(cfg.u0 + 2.0 * du * count, ell, fam),
    )


# ---------------------------------------------------------------------------
# geometric reflection oracle
# ---------------------------------------------------------------------------


def _line_coeffs(p, q):
    """``(u, v)`` with ``u x + v y = 1`` through ``p`` and ``q``."""
    det = p[0] * q[1] - p[1] * q[0]
    if abs(det) < 1e-14 * max(1.0, np.dot(p, p), np.dot(q, q)):
        raise GeometryError("line passes through the center")
    return (q[1] - p[1]) / det, (p[0] - q[0]) / det


def _caustic_contact(p, q, fam: ConfocalFamily) -> np.ndarray:
    # pole of line pq w.r.t. the caustic == tangency point when pq is tangent
    u, v = _line_coeffs(p, q)
    return np.array([fam.a_c ** 2 * u, fam.b_c ** 2 * v])


def _second_intersection(p, direction, ell: ConfocalEllipse) -> np.ndarray:
    inv = np.array([1.0 / ell.a_e ** 2, 1.0 / ell.b_e ** 2])
    quad = float(np.sum(inv * direction * direction))
    lin = float(np.sum(inv * p * direction))
    if quad <= 0.0:
        raise GeometryError("degenerate direction")
    s = -2.0 * lin / quad
    if not s > 0.0:
        raise GeometryError("reflected ray does not re-enter the ellipse")
    return p + s * direction


def reflect_next_geometric(p_prev, p_cur, ell: ConfocalEllipse, fam: ConfocalFamily):
    """Next vertex by optical reflection at ``p_cur``.

    Returns ``(p_next, q)`` with ``q`` the contact point of the caustic with
    the new side ``p_cur p_next``.
    """
    p_prev = np.asarray(p_prev, dtype=float)
    p_cur = np.asarray(p_cur, dtype=float)
    d = p_cur - p_prev
    n = np.array([p_cur[0] / ell.a_e ** 2, p_cur[1] / ell.b_e ** 2])
    n /= np.hypot(*n)
    reflected = d - 2.0 * np.dot(d, n) * n
    p_next = _second_intersection(p_cur, reflected, ell)
    return p_next, _caustic_contact(p_cur, p_next, fam)


def first_contact_geometric(p, fam: ConfocalFamily) -> np.ndarray:
    """Contact point of the counter-clockwise tangent from ``p`` to the caustic.

    The two tangency points lie on the polar of ``p``; the one on the
    counter-clockwise side of the diameter through ``p`` is returned.
    """
    x0, y0 = float(p[0]), float(p[1])
    a, b = fam.a_c, fam.b_c
    # points (a cos s, b sin s) with x0 cos s / a + y0 sin s / b = 1
    A, B = x0 / a, y0 / b
    R = math.hypot(A, B)
    if R <= 1.0:
        raise GeometryError("point is not outside the caustic")
    base = math.atan2(B, A)
    delta = math.acos(1.0 / R)
    candidates = [np.array([a * math.cos(s), b * math.sin(s)]) for s in (base + delta, base - delta)]
    return max(candidates, key=lambda q: x0 * q[1] - y0 * q[0])


def geometric_orbit(p1, ell: ConfocalEllipse, fam: ConfocalFamily, count: int):
    """``count`` vertices and contacts generated from ``p1`` by reflection only."""
    p1 = np.asarray(p1, dtype=float)
    q1 = first_contact_geometric(p1, fam)
    p2 = _second_intersection(p1, q1 - p1, ell)
    vertices, contacts = [p1, p2], [q1]
    while len(vertices) < count + 1:
        p_next, q = reflect_next_geometric(vertices[-2], vertices[-1], ell, fam)
        vertices.append(p_next)
        contacts.append(q)
    contacts.append(_caustic_contact(vertices[count - 1], vertices[count], fam))
    return np.array(vertices[:count]), np.array(contacts[:count])


# ---------------------------------------------------------------------------
# derived quantities
# ---------------------------------------------------------------------------


class ChordLengths(NamedTuple):
    """Distances ``l_i = |P_i Q_i|`` and ``r_i = |Q_{i-1} P_i|``.

    ``l``/``r`` are Euclidean; ``l_formula``/``r_formula`` use the
    closed form in terms of ``||t_c||`` at the neighbouring parameters.
    """

    l: np.ndarray
    r: np.ndarray
    l_formula: np.ndarray
    r_formula: np.ndarray


def chord_lengths(bil: Billiard) -> ChordLengths:
    P, Q = bil.vertices, bil.contacts
    Q_prev = np.vstack([bil.prev_contact[None, :], Q[:-1]])
    l = np.hypot(*(Q - P).T)
    r = np.hypot(*(P - Q_prev).T)

    fam = bil.fam
    scale = math.sqrt(bil.k_e) / (fam.a_c * fam.b_c)
    tc_v = np.array([norm_tc(t, fam) for t in bil.vertex_t])
    tc_c = np.array([norm_tc(t, fam) for t in bil.contact_t])
    tc_prev = np.concatenate([[norm_tc(conic_param(bil.vertex_u[0] - bil.config.delta_u, fam), fam)], tc_c[:-1]])
    return ChordLengths(l, r, scale * tc_v * tc_c, scale * tc_prev * tc_v)


def _signed_angle(v1, v2) -> np.ndarray:
    cross = v1[:, 0] * v2[:, 1] - v1[:, 1] * v2[:, 0]
    dot = np.sum(v1 * v2, axis=1)
    return np.arctan2(cross, dot)


def exterior_angles(bil: Billiard) -> np.ndarray:
    """Exterior angle at each vertex, measured from the polygon itself."""
    starts, ends = bil.side_endpoints()
    outgoing = ends - starts
    prev_start = canonical_point(bil.vertex_u[0] - 2.0 * bil.config.delta_u, bil.ellipse, bil.fam)
    incoming = np.vstack([(bil.vertices[0] - prev_start)[None, :], outgoing[:-1]])
    return _signed_angle(incoming, outgoing)


def turning_number(bil: Billiard) -> float:
    """Winding of the closed vertex polygon around the center."""
    starts, ends = bil.side_endpoints()
    return float(_signed_angle(starts, ends).sum() / (2.0 * math.pi))


# ---------------------------------------------------------------------------
# Poncelet grid
# ---------------------------------------------------------------------------


def grid_ellipse_j(j: int, cfg: BilliardConfig) -> ConfocalEllipse:
    """Ellipse ``e^(j)`` carrying the grid points ``S_i^(j)``.

    Returned with ``at_infinity`` set when ``(j+1) delta_u`` hits an odd
    multiple of ``K``.
    """
    if j < 1:
        raise DomainError("grid index j starts at 1")
    return ellipse_from_delta((j + 1) * cfg.delta_u, cfg.fam)


def intersect_lines(p1, p2, p3, p4) -> GridPoint:
    """Intersection of lines ``p1 p2`` and ``p3 p4``."""
    d1 = np.asarray(p2, dtype=float) - p1
    d2 = np.asarray(p4, dtype=float) - p3
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(cross) <= _PARALLEL_TOL * np.hypot(*d1) * np.hypot(*d2):
        return PointAtInfinity(d1 / np.hypot(*d1))
    w = np.asarray(p3, dtype=float) - p1
    s = (w[0] * d2[1] - w[1] * d2[0]) / cross
    return p1 + s * d1


def default_grid_depth(N: int) -> int:
    """Grid ellipses up to ``j = (N-2)//2``; for even N the last is at infinity."""
    return (N - 2) // 2


@dataclass(frozen=True, eq=False)
class PonceletGrid:
    base: Billiard
    grid_points: dict
    grid_ellipses: list

    @property
    def j_max(self) -> int:
        return len(self.grid_ellipses)


def grid_points(bil: Billiard, j_max: Optional[int] = None) -> PonceletGrid:
    """Intersections of extended sides, ``S_i^(j)`` for ``1 <= j <= j_max``.

    For ``j = 2k`` the sides ``i-k-1`` and ``i+k`` are intersected, for
    ``j = 2k-1`` the sides ``i-k`` and ``i+k`` (side ``i`` joins ``P_i`` and
    ``P_{i+1}``).
    """
    if not bil.is_closed:
        raise ConfigError("grid points need a full period of a periodic billiard")
    N = bil.count
    if j_max is None:
        j_max = default_grid_depth(N)
    P = bil.vertices

    def side(s):
        return P[s % N], P[(s + 1) % N]

    points = {}
    for j in range(1, j_max + 1):
        k = (j + 1) // 2
        for i in range(N):
            first = i - k - 1 if j % 2 == 0 else i - k
            points[(i, j)] = intersect_lines(*side(first), *side(i + k))
    ellipses = [grid_ellipse_j(j, bil.config) for j in range(1, j_max + 1)]
    return PonceletGrid(bil, points, ellipses)


def grid_lattice_params(bil: Billiard, i: int, j: int):
    """Canonical ``(u, v)`` of ``S_i^(j)``: centered on ``P_i`` for even
    ``j`` and on ``Q_i`` for odd ``j``, with ``v = (j+1) delta_u``."""
    du = bil.config.delta_u
    u = bil.vertex_u[i] + (du if j % 2 else 0.0)
    return u, (j + 1) * du


def map_Y(u_tilde: float, v_tilde: float, fam: ConfocalFamily, fold: bool = True) -> GridPoint:
    """Map the ``(u, v)`` plane onto the exterior of the caustic.

    ``v = const`` gives confocal ellipses, ``u = const`` confocal hyperbolas
    and ``u +- v = const`` tangents of the caustic.  With ``fold`` the
    extension is even and ``2K``-periodic in ``v`` (``|cn v|`` in the
    denominator); without it the analytic formula is used, for which
    ``Y(u, v + 2K) = -Y(u, v)``.
    """
    mod = fam.modulus
    sn_u, cn_u, _ = jacobi_sncndn(u_tilde, mod)
    _, cn_v, dn_v = jacobi_sncndn(v_tilde, mod)
    num = np.array([-fam.a_c * sn_u * dn_v, fam.b_c * cn_u])
    if abs(cn_v) < _INF_CN:
        return PointAtInfinity(num / np.hypot(*num))
    denom = abs(cn_v) if fold else cn_v
    return num / denom


class IzmestievCoords(NamedTuple):
    r: float
    s: float


def izmestiev_coords(u_tilde: float, delta_u: float) -> IzmestievCoords:
    """Canonical parameters of the two caustic tangency points seen from a point."""
    return IzmestievCoords(u_tilde - delta_u, u_tilde + delta_u)


# ---------------------------------------------------------------------------
# conjugate billiard
# ---------------------------------------------------------------------------


def conjugate_billiard(bil: Billiard) -> Billiard:
    """Billiard obtained by scaling the contact points from ``c`` onto ``e``.

    ``P'_i`` is the image of ``Q_i``; ``Q'_{i-1}`` is the preimage of ``P_i``.
    """
    if not bil.is_closed:
        raise ConfigError("conjugate billiard needs a full period")
    fam, ell = bil.fam, bil.ellipse
    up = np.array([ell.a_e / fam.a_c, ell.b_e / fam.b_c])
    cfg = bil.config.with_u0(bil.config.u0 + bil.config.delta_u)
    vertices = bil.contacts * up
    contacts = np.roll(bil.vertices, -1, axis=0) / up
    return Billiard(
        config=cfg,
        ellipse=ell,
        vertex_u=bil.contact_u.copy(),
        vertex_t=bil.contact_t.copy(),
        vertices=vertices,
        contact_u=bil.vertex_u + 2.0 * bil.config.delta_u,
        contact_t=np.roll(bil.vertex_t, -1),
        contacts=contacts,
        prev_contact=bil.vertices[0] / up,
        next_vertex=vertices[0].copy(),
    )
