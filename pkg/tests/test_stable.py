import math

import numpy as np
import pytest

from energymax.bodies import BodySpec, RngStream
from energymax.discrete_energy import max_energy_in_body
from energymax.specfun import b_coeff, gaussian_moment, log_gamma
from energymax.stable import (
    StableConfig,
    c_rp,
    gub_upper_bound,
    sample_stable,
    sample_stable_scalar,
    verify_stability_identity,
)


def c_rp_exact(r, p):
    """Moment root of the law with cf exp(-|t|^r):
    (2^p G((1+p)/2) G(1-p/r) / (G(1/2) G(1-p/2)))^(1/p)."""
    lg = log_gamma
    val = (
        p * math.log(2.0)
        + lg((1.0 + p) / 2.0)
        + lg(1.0 - p / r)
        - lg(0.5)
        - lg(1.0 - p / 2.0)
    )
    return math.exp(val / p)


class TestSampler:
    def test_gaussian_case_variance_two(self):
        w = sample_stable(2.0, 400_000, RngStream(40).generator())
        var = w.var(ddof=1)
        se = math.sqrt(2.0 / len(w)) * var
        assert abs(var - 2.0) < 3.5 * se

    def test_cauchy_case_median_of_abs(self):
        w = sample_stable(1.0, 400_000, RngStream(41).generator())
        med = np.median(np.abs(w))
        assert med == pytest.approx(1.0, abs=0.01)

    @pytest.mark.parametrize("r", [1.0, 1.25, 1.5, 1.75, 2.0])
    def test_empirical_characteristic_function(self, r):
        w = sample_stable(r, 400_000, RngStream(42).generator())
        for t in (0.5, 1.0, 2.0):
            vals = np.cos(t * w)
            est = vals.mean()
            se = vals.std(ddof=1) / math.sqrt(len(w))
            assert abs(est - math.exp(-(t**r))) < 3.5 * se

    def test_r_range_enforced(self):
        gen = RngStream(0).generator()
        for r in (0.9, 2.1):
            with pytest.raises(ValueError):
                sample_stable(r, 10, gen)

    def test_scalar_api_deterministic(self):
        cfg = StableConfig(r=1.5, n=1, rng=RngStream(77))
        assert sample_stable_scalar(cfg) == sample_stable_scalar(cfg)
        with pytest.raises(ValueError):
            StableConfig(r=0.5, n=1, rng=RngStream(0))


class TestMomentRoot:
    @pytest.mark.parametrize("p", [1.0, 1.9])
    def test_gaussian_matches_closed_form(self, p):
        est, se = c_rp(2.0, p, 400_000, RngStream(43))
        assert abs(est - gaussian_moment(p)) < 3.0 * se

    def test_light_tail_case_within_stderr(self):
        # 2p < r: plain batch means apply
        est, se = c_rp(1.2, 0.5, 400_000, RngStream(44))
        assert abs(est - c_rp_exact(1.2, 0.5)) < 3.0 * se

    def test_heavy_tail_case_within_one_percent(self):
        # 2p >= r: tail-completed estimate; stderr is a robust proxy, so
        # check the relative error directly
        est, _ = c_rp(1.5, 1.0, 400_000, RngStream(45))
        assert est == pytest.approx(c_rp_exact(1.5, 1.0), rel=0.01)

    def test_self_consistency_two_streams(self):
        e1, s1 = c_rp(1.2, 0.6, 300_000, RngStream(46))
        e2, s2 = c_rp(1.2, 0.6, 300_000, RngStream(47))
        assert abs(e1 - e2) < 3.0 * math.hypot(s1, s2)

    def test_divergent_moment_rejected(self):
        with pytest.raises(ValueError, match="diverges"):
            c_rp(1.5, 1.5, 1000, RngStream(0))
        with pytest.raises(ValueError):
            c_rp(1.0, 1.2, 1000, RngStream(0))


class TestStabilityIdentity:
    def test_basis_vector_collapses(self):
        err = verify_stability_identity(
            np.array([1.0] + [0.0] * 4), 1.5, 1.0, 200_000, RngStream(48)
        )
        assert err < 0.01

    def test_ones_vector_r15(self):
        # left side is 8^(2/3)
        err = verify_stability_identity(np.ones(8), 1.5, 1.0, 400_000, RngStream(49))
        assert err < 0.01

    def test_gaussian_route_random_vector(self):
        gen = np.random.default_rng(50)
        err = verify_stability_identity(gen.standard_normal(5), 2.0, 1.0, 400_000, RngStream(51))
        assert err < 0.01

    def test_rejects_divergent(self):
        with pytest.raises(ValueError):
            verify_stability_identity(np.ones(3), 1.2, 1.3, 1000, RngStream(0))


class TestUpperBound:
    def test_interval_is_exact(self):
        est, _ = gub_upper_bound(BodySpec.interval(), 2.0, 1.0, 1.0, 10_000, RngStream(52))
        assert est == pytest.approx(1.0, abs=1e-12)

    def test_euclidean_ball_tightness(self):
        n = 6
        est, se = gub_upper_bound(BodySpec.lq_ball(n, 2.0), 2.0, 1.0, 1.0, 400_000, RngStream(53))
        assert abs(est - b_coeff(n, 1.0)) < 3.0 * se

    def test_sandwich_against_discrete_lower(self):
        body = BodySpec.lq_ball(8, 2.0)
        lower = max_energy_in_body(body, 1.5, 1.0, (500,), RngStream(54))
        upper, se = gub_upper_bound(body, 1.5, 1.0, 1.0, 200_000, RngStream(55))
        assert lower.value <= upper + 3.0 * se

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            gub_upper_bound(BodySpec.interval(), 1.5, 1.5, 1.0, 1000, RngStream(0))
        with pytest.raises(ValueError):
            gub_upper_bound(BodySpec.interval(), 2.0, 1.0, -1.0, 1000, RngStream(0))
        with pytest.raises(ValueError):
            gub_upper_bound(BodySpec.interval(), 2.0, 1.0, 1.0, 10, RngStream(0))
