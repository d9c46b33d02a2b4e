import math

import numpy as np
import pytest
from scipy.integrate import quad

from energymax.bodies import (
    BodySpec,
    RngStream,
    body_point_set,
    dual_norm,
    mean_width_power,
    pi_p_ellipsoid,
    sample_sphere,
    sphere_lr_moment,
    width,
)
from energymax.specfun import b_coeff, log_gamma, sphere_abs_moment


class TestBodySpec:
    def test_constructors_validate(self):
        with pytest.raises(ValueError):
            BodySpec.lq_ball(0, 2.0)
        with pytest.raises(ValueError):
            BodySpec.lq_ball(3, 0.5)
        with pytest.raises(ValueError):
            BodySpec.ellipsoid(semi_axes=[1.0, -1.0])
        with pytest.raises(ValueError):
            BodySpec.ellipsoid(semi_axes=[1.0], matrix=[[1.0]])
        with pytest.raises(ValueError):
            BodySpec.ellipsoid(matrix=[[1.0, 0.0], [1.0, 0.0]])

    def test_json_roundtrip(self):
        for body in (
            BodySpec.interval(),
            BodySpec.lq_ball(4, 1.5),
            BodySpec.ellipsoid(semi_axes=[2.0, 1.0]),
            BodySpec.ellipsoid(matrix=[[1.0, 0.5], [0.0, 1.0]]),
        ):
            back = BodySpec.from_json(body.to_json())
            assert back.kind == body.kind and back.n == body.n

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            BodySpec.from_json({"kind": "cube", "n": 2})


class TestDualNormAndWidth:
    def test_examples(self):
        e1 = [1.0, 0.0]
        assert dual_norm(e1, BodySpec.lq_ball(2, 2.0)) == pytest.approx(1.0)
        assert dual_norm([1.0, 1.0], BodySpec.lq_ball(2, 1.0)) == pytest.approx(1.0)
        assert dual_norm(e1, BodySpec.ellipsoid(semi_axes=[3.0, 1.0])) == pytest.approx(3.0)
        assert dual_norm([0.7], BodySpec.interval()) == pytest.approx(0.7)

    def test_linf_ball_dual_is_l1(self):
        assert dual_norm([1.0, -2.0], BodySpec.lq_ball(2, math.inf)) == pytest.approx(3.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            dual_norm([1.0, 0.0, 0.0], BodySpec.lq_ball(2, 2.0))

    def test_width_examples(self):
        t = np.array([3.0, 4.0]) / 5.0
        assert width(t, BodySpec.lq_ball(2, 2.0)) == pytest.approx(2.0)
        assert width([1.0, 0.0], BodySpec.ellipsoid(semi_axes=[2.5, 1.0])) == pytest.approx(5.0)
        t = np.array([1.0, 1.0]) / math.sqrt(2.0)
        assert width(t, BodySpec.lq_ball(2, 1.0)) == pytest.approx(math.sqrt(2.0))

    def test_width_rejects_non_unit(self):
        with pytest.raises(ValueError, match="unit"):
            width([1.0, 1.0], BodySpec.lq_ball(2, 2.0))

    def test_norm_axioms_on_random_vectors(self):
        gen = np.random.default_rng(31)
        bodies = [
            BodySpec.lq_ball(4, 1.0),
            BodySpec.lq_ball(4, 1.5),
            BodySpec.lq_ball(4, math.inf),
            BodySpec.ellipsoid(matrix=gen.standard_normal((4, 4)) + 3 * np.eye(4)),
        ]
        for body in bodies:
            for _ in range(25):
                u, v = gen.standard_normal((2, 4))
                c = gen.uniform(-3, 3)
                nu, nv = dual_norm(u, body), dual_norm(v, body)
                assert dual_norm(u + v, body) <= nu + nv + 1e-12
                assert dual_norm(c * u, body) == pytest.approx(abs(c) * nu, abs=1e-12)


class TestSampleSphere:
    def test_unit_norm(self):
        t = sample_sphere(6, RngStream(1))
        assert np.linalg.norm(t) == pytest.approx(1.0, abs=1e-12)

    def test_batch_statistics(self):
        t = sample_sphere(5, RngStream(2), size=200_000)
        se = 1.0 / math.sqrt(5 * len(t))  # coordinate variance is 1/n
        assert abs(t.mean()) < 3 * se / math.sqrt(5)
        m2 = (t[:, 0] ** 2).mean()
        se2 = (t[:, 0] ** 2).std(ddof=1) / math.sqrt(len(t))
        assert abs(m2 - 0.2) < 3 * se2

    def test_deterministic(self):
        a = sample_sphere(3, RngStream(5), size=10)
        b = sample_sphere(3, RngStream(5), size=10)
        np.testing.assert_array_equal(a, b)


class TestMeanWidthPower:
    def test_euclidean_ball_is_exact(self):
        est, se = mean_width_power(BodySpec.lq_ball(7, 2.0), 1.3, 1000, RngStream(3))
        assert est == pytest.approx(1.0, abs=1e-14)
        assert se == pytest.approx(0.0, abs=1e-14)

    def test_round_ellipsoid(self):
        c, p = 1.7, 0.8
        est, _ = mean_width_power(
            BodySpec.ellipsoid(semi_axes=[c, c, c]), p, 1000, RngStream(4)
        )
        assert est == pytest.approx(c**p, rel=1e-12)

    def test_self_consistency_between_runs(self):
        body = BodySpec.lq_ball(8, 1.5)
        e1, s1 = mean_width_power(body, 1.0, 200_000, RngStream(10))
        e2, s2 = mean_width_power(body, 1.0, 200_000, RngStream(11))
        assert abs(e1 - e2) < 3.0 * math.hypot(s1, s2)

    def test_sample_floor(self):
        with pytest.raises(ValueError):
            mean_width_power(BodySpec.lq_ball(2, 2.0), 1.0, 50, RngStream(0))


class TestSphereLrMoment:
    def test_r2_and_n1_exact(self):
        assert sphere_lr_moment(5, 2.0, 1.7, 1000, RngStream(0)) == (1.0, 0.0)
        assert sphere_lr_moment(1, 1.0, 0.5, 1000, RngStream(0)) == (1.0, 0.0)

    def test_l1_moment_against_gaussian_quotient(self):
        # E||t||_1 on S^{n-1} equals n E|g| / E||g||_2 by polar independence
        n = 4
        e_abs = math.sqrt(2.0 / math.pi)
        e_norm = math.sqrt(2.0) * math.exp(log_gamma((n + 1) / 2) - log_gamma(n / 2))
        oracle = n * e_abs / e_norm
        est, se = sphere_lr_moment(n, 1.0, 1.0, 400_000, RngStream(6))
        assert abs(est - oracle) < 3.0 * se

    def test_normalized_envelope_small(self):
        for n in (2, 16, 256):
            for r in (1.0, 1.5):
                est, se = sphere_lr_moment(n, r, 1.0, 50_000, RngStream(7))
                phi = est * n ** ((0.5 - 1.0 / r) * 1.0)
                assert phi <= 1.0 + 3.0 * se * n ** ((0.5 - 1.0 / r))
            for r in (2.0, 3.0):
                est, se = sphere_lr_moment(n, r, 1.0, 50_000, RngStream(8))
                phi = est * n ** ((0.5 - 1.0 / r) * 1.0)
                assert phi >= 1.0 - 3.0 * se * n ** ((0.5 - 1.0 / r))


class TestPiP:
    def test_identity_reproduces_b_coeff(self):
        for n in (2, 3, 8):
            est, se = pi_p_ellipsoid(np.eye(n), 1.0, 10_000, RngStream(9))
            assert abs(est - b_coeff(n, 1.0)) <= 3.0 * se + 1e-12 * b_coeff(n, 1.0)

    def test_scaling(self):
        c, n, p = 2.5, 3, 1.2
        est, _ = pi_p_ellipsoid(c * np.eye(n), p, 10_000, RngStream(12))
        assert est == pytest.approx(c**p * b_coeff(n, p), rel=1e-10)

    def test_diag_2_1_against_quadrature(self):
        # circle average of ||diag(2,1) t||_2 computed by 1-d quadrature
        integral, _ = quad(
            lambda th: math.sqrt(4 * math.cos(th) ** 2 + math.sin(th) ** 2),
            0.0,
            2.0 * math.pi,
        )
        oracle = (integral / (2 * math.pi)) / sphere_abs_moment(2, 1.0)
        est, se = pi_p_ellipsoid(np.diag([2.0, 1.0]), 1.0, 200_000, RngStream(13))
        assert abs(est - oracle) < 3.0 * se

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            pi_p_ellipsoid(np.array([[1.0, 0.0], [1.0, 0.0]]), 1.0, 1000, RngStream(0))

    def test_hilbert_schmidt_equivalence_across_dims(self):
        # pi_p(diag(a))^p / (sum a_i^2)^(p/2) stays within a dimension-free
        # bracket (here: spread under 4x across n)
        p = 1.0
        ratios = []
        for n in (2, 8, 64):
            gen = np.random.default_rng(n)
            a = gen.uniform(0.5, 2.0, n)
            est, _ = pi_p_ellipsoid(a, p, 100_000, RngStream(14, n))
            ratios.append(est / float(np.sum(a**2)) ** (p / 2.0))
        assert max(ratios) / min(ratios) < 4.0


class TestBodyPointSet:
    @pytest.mark.parametrize(
        "body",
        [
            BodySpec.lq_ball(3, 2.0),
            BodySpec.lq_ball(8, 1.5),
            BodySpec.ellipsoid(semi_axes=[2.0, 1.0, 0.5]),
        ],
    )
    def test_nested_and_deterministic(self, body):
        rng = RngStream(21)
        small = body_point_set(body, 300, rng)
        large = body_point_set(body, 900, rng)
        np.testing.assert_array_equal(small, large[: len(small)])
        again = body_point_set(body, 900, RngStream(21))
        np.testing.assert_array_equal(large, again)

    def test_points_inside_lq_ball(self):
        for q in (1.0, 1.5, 2.0):
            pts = body_point_set(BodySpec.lq_ball(5, q), 500, RngStream(22))
            norms = np.sum(np.abs(pts) ** q, axis=1) ** (1.0 / q)
            assert norms.max() <= 1.0 + 1e-9

    def test_points_inside_ellipsoid(self):
        body = BodySpec.ellipsoid(semi_axes=[2.0, 0.5])
        pts = body_point_set(body, 200, RngStream(23))
        pulled = pts / np.array([2.0, 0.5])
        assert np.linalg.norm(pulled, axis=1).max() <= 1.0 + 1e-9

    def test_contains_axis_extremes(self):
        pts = body_point_set(BodySpec.lq_ball(4, 2.0), 100, RngStream(24))
        for i in range(4):
            e = np.zeros(4)
            e[i] = 1.0
            assert min(np.linalg.norm(pts - e, axis=1)) < 1e-12
            assert min(np.linalg.norm(pts + e, axis=1)) < 1e-12

    def test_interval_grid(self):
        pts = body_point_set(BodySpec.interval(), 51, RngStream(25))
        assert pts.shape == (51, 1)
        np.testing.assert_allclose(pts[0], [-1.0])
        np.testing.assert_allclose(pts[-1], [1.0])
        np.testing.assert_allclose(pts.ravel(), -pts.ravel()[::-1], atol=1e-15)
