"""Elliptic integral of the first kind and Jacobi elliptic functions.

All routines take the *modulus* ``m`` (not the parameter ``m**2``), with
``0 <= m < 1``.  Evaluation uses the arithmetic-geometric mean and the
descending Landen transformation, both of which converge quadratically.

References
----------
NIST DLMF 19.8 (AGM for K), 22.20(ii) (AGM for the Jacobi functions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

from .exceptions import DomainError

# AGM stops once the modulus sequence c_n / a_n is below this.
_AGM_CUTOFF = 1e-16
_MAX_ITER = 64


@dataclass(frozen=True)
class Modulus:
    """Elliptic modulus with its cached complementary modulus."""

    m: float

    def __post_init__(self):
        if not (0.0 <= self.m < 1.0) or math.isnan(self.m):
            raise DomainError(f"modulus must satisfy 0 <= m < 1, got {self.m!r}")

    @property
    def m_comp(self) -> float:
        # (1-m)(1+m) avoids cancellation for m close to 1
        return math.sqrt((1.0 - self.m) * (1.0 + self.m))

    def __float__(self):
        return self.m


ModulusLike = Union[float, Modulus]


class JacobiTriple(NamedTuple):
    sn: float
    cn: float
    dn: float


def as_modulus(m: ModulusLike) -> Modulus:
    return m if isinstance(m, Modulus) else Modulus(float(m))


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two positive numbers."""
    for _ in range(_MAX_ITER):
        if abs(a - b) <= _AGM_CUTOFF * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_K(m: ModulusLike) -> float:
    """Quarter period ``K(m) = F(pi/2, m)``."""
    mod = as_modulus(m)
    return math.pi / (2.0 * agm(1.0, mod.m_comp))


def _F_principal(phi: float, mod: Modulus) -> float:
    # Descending Landen transformation in tangent form, |phi| <= pi/2.
    a, b = 1.0, mod.m_comp
    scale = 1.0
    for _ in range(_MAX_ITER):
        if abs(a - b) <= _AGM_CUTOFF * a:
            break
        base = math.atan((b / a) * math.tan(phi))
        # keep phi_{n+1} - phi_n on the branch nearest phi_n
        base += math.pi * round((phi - base) / math.pi)
        phi = phi + base
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        scale *= 2.0
    return phi / (scale * a)


def incomplete_F(phi: float, m: ModulusLike) -> float:
    """Incomplete elliptic integral of the first kind ``F(phi, m)``.

    Arguments outside ``[-pi/2, pi/2]`` are reduced with
    ``F(phi + n*pi) = F(phi) + 2*n*K``.
    """
    mod = as_modulus(m)
    n = round(phi / math.pi)
    phi0 = phi - n * math.pi
    value = _F_principal(phi0, mod)
    if n:
        value += 2 * n * complete_K(mod)
    return value


def _am_reduced(u: float, mod: Modulus) -> float:
    # DLMF 22.20(ii): forward AGM sequence, then backward amplitude recursion.
    a, b, c = 1.0, mod.m_comp, mod.m
    a_seq, c_seq = [a], [c]
    for _ in range(_MAX_ITER):
        if abs(c) <= _AGM_CUTOFF * a:
            break
        a_next = 0.5 * (a + b)
        c = 0.25 * c * c / a_next
        b = math.sqrt(a * b)
        a = a_next
        a_seq.append(a)
        c_seq.append(c)
    n = len(a_seq) - 1
    phi = (2.0 ** n) * a_seq[n] * u
    for k in range(n, 0, -1):
        phi = 0.5 * (phi + math.asin(c_seq[k] / a_seq[k] * math.sin(phi)))
    return phi


def jacobi_am(u_tilde: float, m: ModulusLike) -> float:
    """Jacobi amplitude, the inverse of ``F(., m)``.

    Satisfies ``am(u + 2K) = am(u) + pi`` exactly in the reduction.
    """
    mod = as_modulus(m)
    if mod.m == 0.0:
        return float(u_tilde)
    K = complete_K(mod)
    n = round(u_tilde / (2.0 * K))
    return n * math.pi + _am_reduced(u_tilde - 2.0 * n * K, mod)


def jacobi_sncndn(u_tilde: float, m: ModulusLike) -> JacobiTriple:
    """Return ``(sn, cn, dn)`` at ``u_tilde`` for modulus ``m``."""
    mod = as_modulus(m)
    phi = jacobi_am(u_tilde, mod)
    sn, cn = math.sin(phi), math.cos(phi)
    # 1 - m^2 sn^2 rewritten as m'^2 + m^2 cn^2: no cancellation near m -> 1
    dn = math.sqrt(mod.m_comp ** 2 + (mod.m * cn) ** 2)
    return JacobiTriple(sn, cn, dn)


def sn(u_tilde: float, m: ModulusLike) -> float:
    return jacobi_sncndn(u_tilde, m).sn


def cn(u_tilde: float, m: ModulusLike) -> float:
    return jacobi_sncndn(u_tilde, m).cn


def dn(u_tilde: float, m: ModulusLike) -> float:
    return jacobi_sncndn(u_tilde, m).dn
