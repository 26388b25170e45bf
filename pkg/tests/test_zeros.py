"""Zero location, gap pairing, stationary points, and serialization."""
import dataclasses
import json
import math

import numpy as np
import pytest

from hardyz import (
    DEFAULT_CONFIG,
    DomainError,
    Window,
    ZeroRecord,
    ZeroSet,
    default_scan_step,
    gram_points,
    hardy_z,
    hardy_z_vec,
    locate_zeros,
    rs_theta,
    stationary_points,
    zero_count_formula,
)

GAMMA_1_TO_5 = (
    14.134725141734693790,
    21.022039638771554993,
    25.010857580145688763,
    30.424876125859513210,
    32.935061587739189691,
)
GRAM_0 = 17.845599540410860817
GRAM_1 = 23.170282701246309279
LAMBDA_1 = 17.882582076936682719
Z_AT_LAMBDA_1 = 2.3405510299088180828


class TestCountFormula:
    def test_cancellation_point(self):
        assert abs(zero_count_formula(math.tau * math.e)) < 1e-12

    def test_reference_values(self):
        assert abs(zero_count_formula(100.0) - 28.127) < 5e-3
        assert abs(zero_count_formula(1000.0) - 647.74) < 5e-2

    def test_positive_T_required(self):
        with pytest.raises(DomainError):
            zero_count_formula(0.0)


class TestGramPoints:
    def test_first_two(self):
        gs = gram_points(Window(17.0, 8.0))
        assert len(gs) == 2
        assert abs(gs[0] - GRAM_0) < 1e-9
        assert abs(gs[1] - GRAM_1) < 1e-9

    def test_theta_is_integer_multiple_of_pi(self):
        for g in gram_points(Window(100.0, 30.0)):
            r = rs_theta(g) / math.pi
            assert abs(r - round(r)) < 1e-9

    def test_spacing_matches_asymptotic(self):
        gs = gram_points(Window(1e4, 50.0))
        diffs = np.diff(gs)
        mean_gap = math.tau / math.log(1e4 / math.tau)
        assert np.all(np.abs(diffs - mean_gap) < 0.02 * mean_gap)

    def test_window_without_gram_points_is_empty(self):
        assert gram_points(Window(10.0, 6.0)) == []


class TestLocateZeros:
    def test_first_zero_rediscovered(self):
        zs = locate_zeros(Window(14.0, 1.0))
        assert zs.count == 1
        assert abs(zs.records[0].gamma - GAMMA_1_TO_5[0]) < 1e-9

    def test_first_five_zeros(self):
        zs = locate_zeros(Window(14.0, 19.5))
        assert zs.count == 5
        for rec, ref in zip(zs.records, GAMMA_1_TO_5):
            assert abs(rec.gamma - ref) < 1e-9

    def test_gap_pairing_shares_endpoints(self):
        zs = locate_zeros(Window(50.0, 30.0))
        for a, b in zip(zs.records, zs.records[1:]):
            assert a.gamma_plus == b.gamma

    def test_z_vanishes_at_every_gamma(self):
        zs = locate_zeros(Window(100.0, 100.0))
        vals = np.abs(hardy_z_vec(zs.gammas())[0])
        assert vals.max() < 1e-7

    def test_count_against_formula(self):
        zs = locate_zeros(Window(100.0, 100.0))
        expected = zero_count_formula(200.0) - zero_count_formula(100.0)
        assert abs(zs.count - expected) <= 2.0 * math.log(200.0)

    def test_determinism(self):
        a = locate_zeros(Window(5000.0, 10.0))
        b = locate_zeros(Window(5000.0, 10.0))
        assert a.to_csv() == b.to_csv()

    def test_custom_step_same_zeros(self):
        w = Window(1e4, 5.0)
        a = locate_zeros(w)
        b = locate_zeros(w, initial_step=default_scan_step(w) / 4)
        assert a.count == b.count
        assert np.allclose(a.gammas(), b.gammas(), atol=1e-8)

    def test_bad_mismatch_policy_rejected(self):
        with pytest.raises(DomainError):
            locate_zeros(Window(100.0, 1.0), on_count_mismatch="ignore")


class TestStationaryPoints:
    def test_first_gap_extremum(self):
        zs = stationary_points(locate_zeros(Window(14.0, 8.0)))
        rec = zs.records[0]
        assert abs(rec.lam - LAMBDA_1) < 1e-9
        assert abs(rec.z_at_lambda - Z_AT_LAMBDA_1) < 1e-9

    def test_probe_grid_maximality(self):
        zs = stationary_points(locate_zeros(Window(1e4, 6.0)))
        for rec in zs.records:
            grid = np.linspace(rec.gamma, rec.gamma_plus, 1024)
            zmax = np.abs(hardy_z_vec(grid)[0]).max()
            assert abs(rec.z_at_lambda) >= zmax - 1e-9

    def test_hundred_gaps_interlace(self):
        w = Window(1e5, 70.0)
        zs = stationary_points(locate_zeros(w))
        assert zs.count >= 100
        for rec in zs.records:
            assert rec.gamma < rec.lam < rec.gamma_plus

    def test_alternating_extremum_signs(self):
        zs = stationary_points(locate_zeros(Window(200.0, 20.0)))
        signs = np.sign([r.z_at_lambda for r in zs.records])
        assert np.all(signs[1:] == -signs[:-1])

    def test_degenerate_gap_passthrough(self):
        rec = ZeroRecord(gamma=100.0, gamma_plus=100.0, degenerate=True)
        zs = ZeroSet(window=Window(99.0, 2.0), records=(rec,), count=1)
        out = stationary_points(zs)
        assert out.records[0].lam == 100.0
        assert out.records[0].z_at_lambda == 0.0

    def test_empty_set_passthrough(self):
        zs = ZeroSet(window=Window(50.0, 0.1), records=(), count=0)
        assert stationary_points(zs) is zs


class TestTypes:
    def test_window_validation(self):
        with pytest.raises(DomainError):
            Window(100.0, -1.0)
        with pytest.raises(DomainError):
            Window(1.0, 10.0)
        with pytest.raises(DomainError):
            Window(math.inf, 1.0)
        Window(1e7, 100.0).validate(DEFAULT_CONFIG)
        with pytest.raises(DomainError):
            Window(1e8, 100.0).validate(DEFAULT_CONFIG)

    def test_record_validation(self):
        with pytest.raises(DomainError):
            ZeroRecord(gamma=20.0, gamma_plus=19.0)
        with pytest.raises(DomainError):
            ZeroRecord(gamma=20.0, gamma_plus=21.0, lam=25.0)
        assert ZeroRecord(gamma=20.0, gamma_plus=21.0).gap == 1.0

    def test_zeroset_validation(self):
        r1 = ZeroRecord(gamma=20.0, gamma_plus=21.0)
        r2 = ZeroRecord(gamma=21.5, gamma_plus=22.0)
        with pytest.raises(DomainError):
            ZeroSet(window=Window(19.0, 4.0), records=(r1, r2), count=2)
        with pytest.raises(DomainError):
            ZeroSet(window=Window(19.0, 4.0), records=(r1,), count=2)


class TestSerialization:
    def test_csv_schema_and_shape(self):
        zs = stationary_points(locate_zeros(Window(14.0, 8.0)))
        text = zs.to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == "# zeroset-csv/1"
        assert lines[1] == "gamma,gamma_plus,lambda,z_at_lambda"
        assert len(lines) == 2 + zs.count
        first = lines[2].split(",")
        assert float(first[0]) == zs.records[0].gamma

    def test_json_round_trip(self):
        zs = locate_zeros(Window(14.0, 8.0))
        obj = json.loads(zs.to_json())
        assert obj["schema"] == "zeroset/1"
        assert obj["count"] == zs.count
        assert obj["records"][0]["gamma"] == zs.records[0].gamma
        assert obj["records"][0]["lambda"] is None

    def test_csv_is_repr_exact(self):
        zs = locate_zeros(Window(5000.0, 3.0))
        line = zs.to_csv().strip().split("\n")[2]
        assert float(line.split(",")[0]) == zs.records[0].gamma
