"""Elliptic billiards with a confocal elliptic caustic.

Canonical parametrization by Jacobi elliptic functions, Poncelet grids,
billiard kinematics and residual checks of the associated invariants.
"""

from .billiard import (
    Billiard,
    BilliardConfig,
    PointAtInfinity,
    PonceletGrid,
    build_billiard,
    chord_lengths,
    conjugate_billiard,
    delta_from_ellipse,
    ellipse_for_period,
    exterior_angles,
    geometric_orbit,
    grid_ellipse_j,
    grid_points,
    izmestiev_coords,
    map_Y,
    reflect_next_geometric,
    turning_number,
)
from .confocal import ConfocalEllipse, ConfocalFamily, ConfocalHyperbola, EllipticCoords
from .ellipfn import JacobiTriple, Modulus, complete_K, incomplete_F, jacobi_am, jacobi_sncndn
from .exceptions import ConfigError, DomainError, GeometryError, IntegrationError
from .invariants import InvariantReport, check_all, sweep_motion
from .kinematics import KinematicState, integrate_flow, kinematic_state

__version__ = "0.1.0"
