"""Z(t) and Z'(t): main-sum path vs oracle path, error envelopes, identity
|Z'(t)| = |Z_1(1/2+it)|, and the vectorized evaluator."""
import math

import numpy as np
import pytest

from hardyz import (
    DEFAULT_CONFIG,
    DomainError,
    EvalConfig,
    hardy_z,
    hardy_z_deriv,
    hardy_z_deriv_fast,
    hardy_z_rs,
    hardy_z_vec,
    rs_error_envelope,
    rs_main_terms,
    rs_theta_deriv,
    z1,
)

Z_100 = 2.6926970566644635
Z_1000 = 0.9977946375215866
Z_10000 = -0.3413947242312086
Z_1E6 = -2.8061338784306985
ZD_100 = 0.22244209487830922251
ZD_250_5 = 0.86833425618197475666
ZD_1000_25 = 3.3086089350240934025
Z1_HALF_50I = complex(1.5310388760169020, 0.3781963925850770)


class TestOraclePath:
    def test_reference_values(self):
        assert abs(hardy_z(100.0, method="em").z - Z_100) < 1e-12
        assert abs(hardy_z(1000.0, method="em").z - Z_1000) < 1e-12
        assert abs(hardy_z(10000.0, method="em").z - Z_10000) < 1e-10

    def test_high_point(self):
        assert abs(hardy_z(1e6, method="em").z - Z_1E6) < 5e-9

    def test_im_residual_small(self):
        for t in (50.0, 777.0, 2.5e4):
            assert abs(hardy_z(t, method="em").im_residual) < 1e-9


class TestMainSumPath:
    def test_term_count(self):
        assert rs_main_terms(250.0) == 6

    def test_against_oracle_within_envelope(self):
        rng = np.random.default_rng(404)
        for depth in (0, 1, 2):
            cfg = EvalConfig(rs_correction_terms=depth)
            for _ in range(25):
                t = math.exp(rng.uniform(math.log(300.0), math.log(3e4)))
                a = hardy_z_rs(t, cfg).z
                b = hardy_z(t, cfg, method="em").z
                assert abs(a - b) <= rs_error_envelope(t, depth)

    def test_envelope_tightens_with_depth(self):
        for t in (500.0, 1e4, 1e6):
            e = [rs_error_envelope(t, d) for d in (0, 1, 2)]
            assert e[0] > e[1] > e[2]

    def test_reference_values_within_envelope(self):
        cfg = EvalConfig(rs_correction_terms=2)
        assert abs(hardy_z_rs(1000.0, cfg).z - Z_1000) <= rs_error_envelope(1000.0, 2)
        assert abs(hardy_z_rs(1e6, cfg).z - Z_1E6) <= rs_error_envelope(1e6, 2)

    def test_method_selection(self):
        assert hardy_z(100.0).method == "euler-maclaurin"
        assert hardy_z(5000.0).method == "riemann-siegel"
        assert hardy_z(5000.0, method="em").method == "euler-maclaurin"

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            hardy_z(1.0)
        with pytest.raises(DomainError):
            hardy_z(1e9)
        with pytest.raises(DomainError):
            hardy_z(100.0, method="romberg")


class TestDerivative:
    def test_reference_values(self):
        assert abs(hardy_z_deriv(100.0) - ZD_100) < 1e-9
        assert abs(hardy_z_deriv(250.5) - ZD_250_5) < 1e-9
        assert abs(hardy_z_deriv(1000.25) - ZD_1000_25) < 1e-8

    def test_fast_path_matches_signed_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            t = math.exp(rng.uniform(math.log(250.0), math.log(2e4)))
            a = hardy_z_deriv(t)
            b = hardy_z_deriv_fast(t)
            assert abs(a - b) < 1e-6 * max(1.0, abs(a))

    def test_z1_reference(self):
        v = z1(complex(0.5, 50.0))
        assert abs(v - Z1_HALF_50I) < 1e-11

    def test_z1_magnitude_is_deriv_magnitude(self):
        for t in (50.0, 333.0, 1500.0):
            h = 1e-4
            fd = (
                hardy_z(t + h, method="em").z - hardy_z(t - h, method="em").z
            ) / (2 * h)
            assert math.isclose(abs(z1(complex(0.5, t))), abs(fd), rel_tol=1e-6)

    def test_sign_flips_at_extremum(self):
        # Z has a positive maximum near lambda_1 ~ 17.88.
        assert hardy_z_deriv(17.5) > 0.0
        assert hardy_z_deriv(18.2) < 0.0


class TestVectorized:
    def test_matches_scalar_on_both_branches(self):
        ts = np.array([60.0, 150.0, 199.9, 200.1, 5e3, 2e5])
        z, dz = hardy_z_vec(ts, want_deriv=True)
        for i, t in enumerate(ts):
            cfg = DEFAULT_CONFIG
            if t < 200.0:
                assert abs(z[i] - hardy_z(t, cfg, method="em").z) < 1e-10
            else:
                assert abs(z[i] - hardy_z_rs(t, cfg).z) < 1e-12
            assert abs(dz[i] - hardy_z_deriv_fast(t, cfg)) < 1e-10

    def test_deriv_optional(self):
        ts = np.linspace(300.0, 301.0, 7)
        z, dz = hardy_z_vec(ts)
        assert dz is None
        assert z.shape == ts.shape

    def test_zeta_squared_identity(self):
        # |zeta'(1/2+it)|^2 = Z'^2 + theta'^2 Z^2 on the critical line.
        from hardyz import zeta_deriv_em

        for t in (150.0, 800.0):
            z = hardy_z(t, method="em").z
            dz = hardy_z_deriv_fast(t)
            td = rs_theta_deriv(t)
            lhs = abs(zeta_deriv_em(complex(0.5, t))) ** 2
            assert math.isclose(lhs, dz * dz + td * td * z * z, rel_tol=1e-6)
