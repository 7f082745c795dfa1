import unittest

import numpy as np

from shockform import error
from shockform.core import SystemModel, base_metric, eigenframe, numeric_frame, structure_coeffs, frame_residuals, \
    hyperbolicity_margin, separation_time, sample_ball, genuine_nonlinearity_check, gamma_bound
from shockform.crystal import CrystalParams, crystal_model
from . import create_model, create_params, random_states


def burgers_pair() -> SystemModel:
    # two uncoupled Burgers-like families, lambda = (1 + u1, -1 + u2)
    return SystemModel(
        dimension=2,
        flux_matrix=lambda u: np.stack([
            np.stack([1 + u[..., 0], np.zeros_like(u[..., 0])], axis=-1),
            np.stack([np.zeros_like(u[..., 0]), -1 + u[..., 1]], axis=-1),
        ], axis=-2),
        ball_radius=0.5,
        name="burgers_pair",
    )


class TestFrames(unittest.TestCase):
    def test_base_spectrum(self):
        frame = eigenframe(create_model(), np.zeros(4))
        np.testing.assert_allclose(frame.values, [0.9, 0.7, -0.7, -0.9], atol=1e-14)

    def test_frame_invariants(self):
        model = create_model()
        states = random_states(model.ball_radius)

        for m in [model, crystal_model(create_params(), analytic=False)]:
            residuals = frame_residuals(m, eigenframe(m, states))
            self.assertLess(residuals["eigen"], 1e-9)
            self.assertLess(residuals["left_eigen"], 1e-9)
            self.assertLess(residuals["duality"], 1e-10)
            self.assertLess(residuals["unit_norm"], 1e-12)

    def test_base_metric(self):
        model = create_model()
        e = model.base_frame
        for i in range(4):
            for j in range(4):
                self.assertAlmostEqual(float(model.metric.inner(e[:, i], e[:, j])), float(i == j), places=12)

        # the dual metric measures covectors, so the dual base frame is orthonormal too
        metric = base_metric(model)
        dual = np.linalg.inv(e)
        np.testing.assert_allclose(metric.norm(e.T), 1.0, atol=1e-12)
        np.testing.assert_allclose(metric.dual_norm(dual), 1.0, atol=1e-12)

    def test_numeric_frame(self):
        model = burgers_pair()
        frame = numeric_frame(model, np.array([0.2, 0.1]))
        np.testing.assert_allclose(frame.values, [1.2, -0.9], atol=1e-12)

        # c^i_ii = D_{e_i} lambda_i is made negative by flipping e_i
        coeffs = structure_coeffs(model, frame.state, frame)
        np.testing.assert_allclose(coeffs.diagonal(), [-1.0, -1.0], atol=1e-8)
        np.testing.assert_allclose(np.abs(frame.vectors), np.eye(2), atol=1e-12)

    def test_outside_domain(self):
        model = create_model()
        with self.assertRaises(error.OutOfDomain):
            eigenframe(model, np.array([2.5 * model.ball_radius, 0, 0, 0]))

        with self.assertRaises(error.InvalidParams):
            eigenframe(model, np.zeros(3))


class TestStructureCoefficients(unittest.TestCase):
    def test_gamma_symmetry(self):
        model = create_model(c112=0.01, c122=0.015)
        states = random_states(model.ball_radius, count=50)
        gamma = structure_coeffs(model, states, eigenframe(model, states)).gamma

        np.testing.assert_allclose(gamma, np.swapaxes(gamma, -1, -2), atol=1e-14)
        for i in range(4):
            for l in range(4):
                if l != i:
                    np.testing.assert_allclose(gamma[..., i, l, l], 0.0, atol=1e-14)

    def test_gamma_bound(self):
        model = create_model(c112=0.01, c122=0.015)
        bound = gamma_bound(model, model.ball_radius, samples=64, seed=3)

        states = sample_ball(4, model.ball_radius, 64, 3)
        gamma = structure_coeffs(model, states, eigenframe(model, states)).gamma
        self.assertAlmostEqual(bound, float(np.abs(gamma).sum(axis=(-3, -2, -1)).max()), places=12)
        self.assertGreater(bound, 0)

        # diagonal flux matrices never mix families
        self.assertAlmostEqual(gamma_bound(burgers_pair(), 0.4, samples=32), 0.0, places=12)

    def test_eigenvalue_derivative(self):
        # D_{e_l} lambda_k = c^k_kl
        model = create_model(c112=0.01, c122=0.015)
        states = random_states(model.ball_radius / 2, count=20)
        frame = eigenframe(model, states)
        c = structure_coeffs(model, states, frame).c
        h = 1e-6

        for l in range(4):
            step = h * frame.vector(l)
            fd = (eigenframe(model, states + step).values - eigenframe(model, states - step).values) / (2 * h)
            for k in range(4):
                np.testing.assert_allclose(fd[:, k], c[:, k, k, l], atol=1e-7)

    def test_genuine_nonlinearity(self):
        model = create_model()
        report = genuine_nonlinearity_check(model, model.ball_radius, samples=256, seed=1)
        self.assertTrue(report.tested)
        self.assertEqual(report.families, [True] * 4)

        # C111 = 0 leaves the fast pair linearly degenerate
        model = create_model(c111=0.0)
        report = genuine_nonlinearity_check(model, model.ball_radius, samples=256, seed=1)
        self.assertEqual(report.families, [False, True, True, False])

        report = genuine_nonlinearity_check(model, model.ball_radius, samples=0)
        self.assertFalse(report.tested)


class TestMargin(unittest.TestCase):
    def test_separation_time(self):
        tests = [
            [0.2, 10.0],
            [2.0, 1.0],
            [0.5, 4.0],
        ]

        for sigma, expected in tests:
            self.assertAlmostEqual(separation_time(sigma), expected, places=12)

        for sigma in [0.0, -0.1]:
            with self.assertRaises(error.NonPositiveMargin):
                separation_time(sigma)

    def test_crystal_margin(self):
        model = create_model()
        pointwise = hyperbolicity_margin(model, model.ball_radius, samples=512, seed=3)
        uniform = hyperbolicity_margin(model, model.ball_radius, samples=512, seed=3, uniform=True)

        # the origin is always sampled and its smallest gap is sqrt(K1) - sqrt(K2)
        self.assertGreater(pointwise, 0)
        self.assertLessEqual(pointwise, 0.2 + 1e-12)
        self.assertGreater(uniform, 0)
        self.assertLessEqual(uniform, pointwise + 1e-12)

    def test_vacuum_is_not_hyperbolic(self):
        model = crystal_model(CrystalParams.vacuum())
        with self.assertRaises(error.NonHyperbolic):
            hyperbolicity_margin(model, model.ball_radius, samples=16)

    def test_no_samples(self):
        model = create_model()
        with self.assertRaises(error.InvalidParams):
            hyperbolicity_margin(model, model.ball_radius, samples=0)

    def test_sample_ball(self):
        points = sample_ball(4, 0.3, 300, seed=5)
        self.assertEqual(points.shape, (300, 4))
        np.testing.assert_array_equal(points[0], np.zeros(4))
        self.assertTrue(np.all(np.linalg.norm(points, axis=-1) < 0.3))
        self.assertEqual(sample_ball(4, 0.3, 0).shape, (0, 4))
