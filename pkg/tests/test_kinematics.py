import math

import numpy as np
import pytest

from ellbilliards.billiard import BilliardConfig, build_billiard, exterior_angles
from ellbilliards.confocal import (
    ConfocalFamily,
    cartesian_from_elliptic,
    half_angle,
    point_and_tangents,
)
from ellbilliards.exceptions import DomainError
from ellbilliards.kinematics import (
    CanonicalParam,
    elliptic_coords_canonical,
    half_angle_sum,
    integrate_flow,
    k_h_rate,
    kinematic_state,
    motion_derivative,
    omega_of_side,
    side_length_rate,
    theta_rate,
    velocity_field,
    velocity_field_elliptic,
    vertex_speeds,
)
from conftest import SQ2, SQ3, SQ6


def test_canonical_param(fam):
    p = CanonicalParam.from_tilde(3.0, fam)
    assert p.u == pytest.approx(1.5)


class TestVelocityField:
    def test_fixture_value(self, fam):
        v = velocity_field(math.pi / 2, fam.ellipse(2.0), fam)
        assert v == pytest.approx([-2 * SQ6, 0.0], abs=1e-12)
        assert np.hypot(*v) == pytest.approx(math.sqrt(24), abs=1e-12)

    def test_tangent_to_ellipse(self, fam, rng):
        ell = fam.ellipse(1.4)
        for t in rng.uniform(0, 2 * math.pi, 50):
            p = point_and_tangents(t, ell, fam)[0]
            normal = p / np.array([ell.a_e, ell.b_e]) ** 2
            assert abs(normal @ velocity_field(t, ell, fam)) < 1e-12

    def test_elliptic_form(self, fam, rng):
        a2, b2 = fam.a_c ** 2, fam.b_c ** 2
        for k_e, k_h in zip(rng.uniform(0.2, 5, 30), rng.uniform(-a2 + 0.05, -b2 - 0.05, 30)):
            p = cartesian_from_elliptic((k_e, k_h), (1, 1), fam)
            ell = fam.ellipse(k_e)
            t = math.atan2(p[1] / ell.b_e, p[0] / ell.a_e)
            expected = velocity_field(t, ell, fam)
            scale = max(1.0, np.max(np.abs(expected)))
            got = velocity_field_elliptic(k_e, k_h, fam)
            assert np.max(np.abs(got - expected)) < 1e-10 * scale
            # central differences at h=1e-6 bottom out near eps/h
            got_fd = velocity_field_elliptic(k_e, k_h, fam, h=1e-6)
            assert np.max(np.abs(got_fd - expected)) < 1e-8 * scale

    def test_matches_motion(self, fam):
        # the vertex of the moving billiard travels with this velocity
        cfg = BilliardConfig.periodic(fam, 5, 2, 0.4)
        bil = build_billiard(cfg)
        fd = np.array([motion_derivative(cfg, lambda b, c=c: b.vertices[0][c]) for c in (0, 1)])
        exact = velocity_field(bil.vertex_t[0], bil.ellipse, fam)
        assert np.max(np.abs(fd - exact)) < 1e-6 * np.hypot(*exact)


class TestSpeeds:
    def test_fixture(self, fam):
        ell = fam.ellipse(2.0)
        assert vertex_speeds(math.pi / 2, ell, fam) == pytest.approx((4, 2 * SQ2, 2 * SQ6), abs=1e-10)
        assert vertex_speeds(math.pi, ell, fam) == pytest.approx((1, SQ2, SQ3), abs=1e-10)

    def test_decomposition(self, fam, rng):
        ell = fam.ellipse(0.9)
        for t in rng.uniform(0, 2 * math.pi, 50):
            s = vertex_speeds(t, ell, fam)
            h = half_angle(t, ell, fam)
            half = math.asin(math.sqrt(h.sin_sq_half))
            assert abs(s.v * math.sin(half) - s.v_n) < 1e-12
            assert abs(s.v * math.cos(half) - s.v_t) < 1e-12
            assert abs(s.v - np.hypot(*velocity_field(t, ell, fam))) < 1e-12

    def test_domain(self, fam):
        with pytest.raises(DomainError):
            vertex_speeds(0.3, fam.caustic, fam)

    def test_omega_fixture(self, rhombus, fam):
        ks = kinematic_state(rhombus)
        assert ks.omega == pytest.approx([SQ2] * 4, abs=1e-10)
        # r_{i+1} omega_i = v_n(P_{i+1}) and l_i omega_i = v_n(P_i)
        assert 1.0 * ks.omega[0] == pytest.approx(ks.v_n[1], abs=1e-10)
        assert 2.0 * ks.omega[0] == pytest.approx(ks.v_n[0], abs=1e-10)

    def test_omega_ratio(self, fam):
        from ellbilliards.billiard import chord_lengths

        bil = build_billiard(BilliardConfig.periodic(fam, 7, 2, 0.3))
        ks = kinematic_state(bil)
        ch = chord_lengths(bil)
        for i in range(1, 7):
            assert abs(ks.omega[i] / ks.omega[i - 1] - ch.r[i] / ch.l[i]) < 1e-10

    def test_omega_matches_motion(self, fam):
        cfg = BilliardConfig.periodic(fam, 5, 1, 0.6)
        bil = build_billiard(cfg)

        def direction(b):
            d = b.vertices[1] - b.vertices[0]
            return math.atan2(d[1], d[0])

        assert abs(motion_derivative(cfg, direction) - omega_of_side(bil.contact_t[0], fam)) < 1e-6

    def test_motion_constant(self, fam):
        for N, tau in ((4, 1), (5, 2), (8, 3)):
            bil = build_billiard(BilliardConfig.periodic(fam, N, tau, 0.21))
            assert np.max(np.abs(kinematic_state(bil).C - bil.k_e)) < 1e-10 * bil.k_e


class TestRates:
    @pytest.mark.parametrize("N, tau, u0", [(5, 1, 0.3), (7, 2, -0.8), (8, 3, 1.1)])
    def test_theta_rate(self, fam, N, tau, u0):
        cfg = BilliardConfig.periodic(fam, N, tau, u0)
        bil = build_billiard(cfg)
        for i in range(N):
            fd = motion_derivative(cfg, lambda b, i=i: exterior_angles(b)[i])
            exact = theta_rate(bil, i)
            assert abs(fd - exact) < 1e-6 * max(1.0, abs(exact))

    @pytest.mark.parametrize("N, tau, u0", [(5, 1, 0.3), (7, 2, -0.8), (8, 3, 1.1)])
    def test_side_rate(self, fam, N, tau, u0):
        cfg = BilliardConfig.periodic(fam, N, tau, u0)
        bil = build_billiard(cfg)
        rates = [side_length_rate(bil, i) for i in range(N)]
        for i in range(N):
            fd = motion_derivative(cfg, lambda b, i=i: b.side_lengths()[i])
            assert abs(fd - rates[i]) < 1e-6 * max(1.0, abs(rates[i]))
        assert abs(sum(rates)) < 1e-12

    def test_fixture_rates(self, rhombus):
        assert [theta_rate(rhombus, i) for i in range(4)] == pytest.approx([0] * 4, abs=1e-12)
        assert side_length_rate(rhombus, 0) == pytest.approx(-3.0, abs=1e-12)
        assert side_length_rate(rhombus, 1) == pytest.approx(3.0, abs=1e-12)

    def test_half_angle_sum(self, fam):
        bil = build_billiard(BilliardConfig.periodic(fam, 7, 3, 0.45))
        for i in range(7):
            lhs, rhs = half_angle_sum(bil, i)
            assert abs(lhs - rhs) < 1e-12


class TestFlow:
    def test_identity(self, fam):
        assert integrate_flow(0.3, 0.0, fam) == 0.3

    def test_quarter_period(self, fam):
        t = integrate_flow(math.pi / 2, fam.K / fam.a_c, fam)
        assert abs(t - math.pi) < 1e-6
        assert abs(t - math.pi) < 1e-9

    def test_circle(self):
        circ = ConfocalFamily(1.5, 1.5)
        assert integrate_flow(0.2, 0.7, circ) == pytest.approx(0.2 + 1.5 * 0.7, abs=1e-9)

    def test_against_amplitude(self, fam, rng):
        from ellbilliards.billiard import conic_param

        for u in rng.uniform(-3, 3, 5):
            t = integrate_flow(math.pi / 2, u / fam.a_c, fam)
            assert abs(t - conic_param(u, fam)) < 1e-8

    def test_bad_tolerance(self, fam):
        with pytest.raises(DomainError):
            integrate_flow(0.0, 1.0, fam, tol=0.0)


class TestEllipticCoordsCanonical:
    def test_fixture(self, fam):
        du = fam.K / 2
        assert elliptic_coords_canonical(0.0, du, fam)[:2] == pytest.approx((2.0, -4.0), abs=1e-12)
        assert elliptic_coords_canonical(fam.K, du, fam)[:2] == pytest.approx((2.0, -1.0), abs=1e-12)

    def test_matches_vertices(self, fam):
        bil = build_billiard(BilliardConfig.periodic(fam, 7, 2, 0.3))
        from ellbilliards.confocal import elliptic_from_cartesian

        for u, p in zip(bil.vertex_u, bil.vertices):
            got = elliptic_coords_canonical(u, bil.config.delta_u, fam)
            ref = elliptic_from_cartesian(p, fam)
            assert got[:2] == pytest.approx((ref.k_e, ref.k_h), abs=1e-10)

    def test_ode(self, fam):
        # first quadrant (u in (-K, 0)): dk_h/du = -2 sqrt(k_h (a^2+k_h)(b^2+k_h)), u = u_tilde / a_c
        h = 1e-5
        for ut in np.linspace(-fam.K + 0.1, -0.1, 9):
            k_h = elliptic_coords_canonical(ut, 0.5, fam).k_h
            plus = elliptic_coords_canonical(ut + fam.a_c * h, 0.5, fam).k_h
            minus = elliptic_coords_canonical(ut - fam.a_c * h, 0.5, fam).k_h
            fd = (plus - minus) / (2 * h)
            assert abs(fd + k_h_rate(k_h, fam)) < 1e-5 * k_h_rate(k_h, fam)

    def test_ode_sign_flips(self, fam):
        h = 1e-5
        ut = 0.5
        k_h = elliptic_coords_canonical(ut, 0.5, fam).k_h
        fd = (elliptic_coords_canonical(ut + fam.a_c * h, 0.5, fam).k_h
              - elliptic_coords_canonical(ut - fam.a_c * h, 0.5, fam).k_h) / (2 * h)
        assert fd > 0
        assert abs(fd - k_h_rate(k_h, fam)) < 1e-5 * k_h_rate(k_h, fam)

    def test_chain_speed(self, fam):
        # |dX/du| computed through k_h equals the vertex speed
        du, ut = 0.6, -0.4
        k_e, k_h = elliptic_coords_canonical(ut, du, fam)[:2]
        h = 1e-6
        dX = (cartesian_from_elliptic((k_e, k_h + h), (1, 1), fam)
              - cartesian_from_elliptic((k_e, k_h - h), (1, 1), fam)) / (2 * h)
        speed = k_h_rate(k_h, fam) * np.hypot(*dX)
        assert speed == pytest.approx(math.sqrt(k_h * (k_h - k_e)), rel=1e-8)
