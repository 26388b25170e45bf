"""Evaluator checks: log-gamma/digamma, chi, theta, and the zeta pair.

Reference values were frozen from an independent 50-digit computation
before these implementations existed; tolerances reflect double-precision
evaluator accuracy, not the references.
"""
import cmath
import math

import numpy as np
import pytest

from hardyz import (
    DomainError,
    GammaPoleError,
    chi,
    chi_log_deriv,
    digamma,
    log_gamma,
    rs_theta,
    rs_theta_deriv,
    zeta_deriv_em,
    zeta_em,
    zeta_with_deriv_em,
)
from hardyz.zeta_core import rs_theta_deriv_vec, rs_theta_vec

LOG_GAMMA_3_4I = complex(-1.7566267846037841, 4.7426644380346579)
DIGAMMA_Q_50I = complex(3.9120188386885589, 1.5757964518105264)
ZETA_HALF_100I = complex(2.6926198856813241, -0.0203860296025982)
ZETA_HALF_50I = complex(-0.0817121083209800, 0.3307921940386613)
ZETA_OFFLINE = complex(1.0028736444244739, 0.4910314872078770)
ZETA_D_2 = -0.9375482543158438
ZETA_D_HALF_50I = complex(1.6157796138563031, 0.0351435064174926)
CHI_03_10I = complex(1.0854804206987667, -0.1607637935814276)
THETA_1000 = 2034.5464280380316087


class TestLogGamma:
    def test_reference_point(self):
        assert abs(log_gamma(complex(3, 4)) - LOG_GAMMA_3_4I) < 5e-15

    def test_real_axis_matches_math_lgamma(self):
        for x in (0.5, 1.0, 2.5, 7.5, 30.0):
            assert math.isclose(
                log_gamma(complex(x)).real, math.lgamma(x), rel_tol=1e-13,
                abs_tol=1e-13,
            )
            assert log_gamma(complex(x)).imag == 0.0

    def test_recurrence(self):
        for z in (complex(0.25, 12.0), complex(3.0, -4.0), complex(0.8, 0.3)):
            lhs = log_gamma(z + 1)
            rhs = log_gamma(z) + cmath.log(z)
            assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))

    def test_poles_raise(self):
        for z in (0.0, -1.0, -7.0):
            with pytest.raises(GammaPoleError):
                log_gamma(complex(z))


class TestDigamma:
    def test_reference_point(self):
        assert abs(digamma(complex(0.25, 50)) - DIGAMMA_Q_50I) < 5e-15

    def test_recurrence(self):
        for z in (complex(0.25, 5.0), complex(2.0, -3.0)):
            assert abs(digamma(z + 1) - digamma(z) - 1 / z) < 1e-13

    def test_pole_raises(self):
        with pytest.raises(GammaPoleError):
            digamma(complex(-2.0))


class TestChi:
    def test_reference_point(self):
        assert abs(chi(complex(0.3, 10)) - CHI_03_10I) < 1e-13

    def test_reflection_product_is_one(self):
        rng = np.random.default_rng(101)
        for _ in range(50):
            s = complex(rng.uniform(0.1, 0.9), rng.uniform(2.0, 400.0))
            assert abs(chi(s) * chi(1 - s) - 1.0) < 1e-12

    def test_unit_modulus_on_critical_line(self):
        for t in (10.0, 77.3, 1234.5):
            assert abs(abs(chi(complex(0.5, t))) - 1.0) < 1e-12

    def test_log_deriv_is_minus_two_theta_deriv(self):
        for t in (50.0, 300.0, 4e3):
            v = chi_log_deriv(complex(0.5, t))
            assert abs(v.imag) < 1e-12 * abs(v)
            assert math.isclose(v.real, -2.0 * rs_theta_deriv(t), rel_tol=1e-12)


class TestTheta:
    def test_reference_point(self):
        assert abs(rs_theta(1000.0) - THETA_1000) < 1e-9

    def test_deriv_matches_finite_difference(self):
        for t in (60.0, 500.0, 2.5e4):
            h = 1e-5 * t
            fd = (rs_theta(t + h) - rs_theta(t - h)) / (2 * h)
            assert math.isclose(rs_theta_deriv(t), fd, rel_tol=1e-8)

    def test_vector_paths_match_scalar(self):
        ts = np.array([30.0, 111.0, 5050.0, 9.9e5])
        assert np.allclose(rs_theta_vec(ts), [rs_theta(t) for t in ts], rtol=1e-14)
        assert np.allclose(
            rs_theta_deriv_vec(ts), [rs_theta_deriv(t) for t in ts], rtol=1e-14
        )

    def test_deriv_positive_above_2pi(self):
        assert rs_theta_deriv(10.0) > 0.0
        assert rs_theta_deriv(1e6) > 0.0


class TestZetaEM:
    def test_critical_line_references(self):
        assert abs(zeta_em(complex(0.5, 100)) - ZETA_HALF_100I) < 1e-12
        assert abs(zeta_em(complex(0.5, 50)) - ZETA_HALF_50I) < 1e-12

    def test_off_line_reference(self):
        assert abs(zeta_em(complex(1.5, 777.25)) - ZETA_OFFLINE) < 1e-11

    def test_real_point(self):
        assert abs(zeta_em(complex(2.0)) - math.pi**2 / 6) < 1e-13

    def test_conjugate_symmetry(self):
        s = complex(0.7, 33.3)
        assert abs(zeta_em(s.conjugate()) - zeta_em(s).conjugate()) < 1e-13

    def test_pole_raises(self):
        with pytest.raises(DomainError):
            zeta_em(complex(1.0, 0.0))

    def test_functional_equation(self):
        rng = np.random.default_rng(77)
        for _ in range(25):
            s = complex(rng.uniform(0.1, 0.9), rng.uniform(5.0, 250.0))
            lhs = zeta_em(s)
            rhs = chi(s) * zeta_em(1 - s)
            assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(lhs))


class TestZetaDerivEM:
    def test_real_reference(self):
        assert abs(zeta_deriv_em(complex(2.0)) - ZETA_D_2) < 1e-13

    def test_critical_line_reference(self):
        assert abs(zeta_deriv_em(complex(0.5, 50)) - ZETA_D_HALF_50I) < 1e-12

    def test_finite_difference_cross_check(self):
        s = complex(0.6, 41.0)
        h = 1e-6
        fd = (zeta_em(s + h) - zeta_em(s - h)) / (2 * h)
        assert abs(zeta_deriv_em(s) - fd) < 1e-8

    def test_pair_evaluator_consistency(self):
        s = complex(0.5, 218.4)
        v, d = zeta_with_deriv_em(s)
        assert abs(v - zeta_em(s)) < 1e-14 * max(1.0, abs(v))
        assert abs(d - zeta_deriv_em(s)) < 1e-14 * max(1.0, abs(d))
