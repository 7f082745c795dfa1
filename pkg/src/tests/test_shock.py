import math
import unittest

import numpy as np

from shockform import error
from shockform.seed import BumpSeed, SimpleWaveSeed, zero_seed
from shockform.shock import SeedStats, ShockForecast, ShockReport, seed_stats, forecast, shock_window, final_fit, \
    detect_shock, validate_window
from shockform.tracer import CharacteristicFan
from . import create_model, create_params, simple_wave_run, THETA


def synthetic_fan(family: int, times: np.ndarray, rho: np.ndarray) -> CharacteristicFan:
    z = np.linspace(-1.5, 1.5, 5)
    rho = np.repeat(rho[:, None], len(z), axis=1)
    rho[:, 0] = 1.0
    v = -0.1 * np.ones_like(rho)
    return CharacteristicFan(family, z, times, z[None, :] + 0.9 * times[:, None], rho, v, v / rho)


def report_at(t_extrap: float) -> ShockReport:
    return ShockReport(t_extrap, 1, 0.0, t_extrap, 0.01, np.array([0.0]), np.array([1.0]), 1.0, -0.01, 1.0)


class TestWindow(unittest.TestCase):
    def test_shock_window(self):
        tests = [
            # |c_iii(0)|, W0+, eps, lower, upper
            [[0.2], 0.01, 1e-3, 500 / 1.001 ** 3, 500 / 0.999 ** 4],
            [[1 / 6, 0.1714], 0.1, 1e-3, 1 / (1.001 ** 3 * 0.01714), 1 / (0.999 ** 4 * 0.1 / 6)],
        ]

        for c, w0_plus, eps, lower, upper in tests:
            lo, hi = shock_window(c, w0_plus, eps)
            self.assertAlmostEqual(lo, lower, places=9)
            self.assertAlmostEqual(hi, upper, places=9)

        # signs of c_iii do not matter
        self.assertEqual(shock_window([-0.2], 0.01, 1e-3), shock_window([0.2], 0.01, 1e-3))

    def test_containment(self):
        window = ShockForecast(500.0, 560.0, 1e-3, [-0.2], 0.01)
        tests = [
            [510.0, True],
            [400.0, False],
            [560.0, True],
            [575.0, True],
            [600.0, False],
            [478.0, True],
            [470.0, False],
        ]

        for t, expected in tests:
            self.assertEqual(validate_window(report_at(t), window, slack=0.05), expected)

        self.assertFalse(validate_window(report_at(math.nan), window))
        self.assertFalse(window.contains(510.0 * 1.2))
        self.assertTrue(window.contains(530.0))


class TestSeedStats(unittest.TestCase):
    def test_symmetric_bump(self):
        # a single-component bump compresses as much as it expands
        model = create_model()
        stats = seed_stats(model, BumpSeed([1.0, 0, 0, 0], 0.05), samples=2001)

        self.assertAlmostEqual(stats.w0_plus, stats.w0, delta=1e-9 * stats.w0)
        self.assertAlmostEqual(stats.w00_plus, stats.w00, delta=1e-9 * stats.w00)
        self.assertTrue(stats.bound_holds)
        self.assertGreaterEqual(stats.w00_plus, stats.lower_bound)
        self.assertIn(stats.family_plus_index, [1, 2, 3, 4])

        keys = ["W0", "W0_plus", "W00", "W00_plus", "L", "family_max", "family_plus", "z_plus",
                "family_plus_index", "lower_bound", "bound_holds"]
        self.assertEqual(sorted(stats.as_dict().keys()), sorted(keys))

    def test_scaling(self):
        # W0 is linear in theta up to the frame's dependence on the state
        model = create_model()
        small = seed_stats(model, BumpSeed([1.0, 0, 0, 0], 0.01), samples=1001)
        large = seed_stats(model, BumpSeed([1.0, 0, 0, 0], 0.02), samples=1001)
        self.assertAlmostEqual(large.w0 / small.w0, 2.0, delta=0.02)
        self.assertAlmostEqual(large.w00, small.w00, delta=1e-9)

    def test_simple_wave(self):
        params = create_params()
        stats = seed_stats(create_model(), SimpleWaveSeed(params, THETA), samples=2001)
        self.assertEqual(stats.family_plus_index, 1)
        self.assertAlmostEqual(stats.w0_plus, 0.1145, delta=2e-3)
        np.testing.assert_allclose(stats.family_plus[1:], 0.0, atol=1e-12)

    def test_zero_seed(self):
        with self.assertRaises(error.ZeroSeed):
            seed_stats(create_model(), zero_seed(4))


class TestForecast(unittest.TestCase):
    def test_forecast(self):
        model = create_model()
        stats = seed_stats(model, SimpleWaveSeed(create_params(), THETA), samples=2001)
        result = forecast(model, stats, epsilon=1e-3, sigma=0.2)

        self.assertLess(result.t_lower, result.t_upper)
        self.assertAlmostEqual(result.t0, 10.0)
        np.testing.assert_allclose(np.abs(result.c_diagonal), [1 / 6, 0.12 / 0.7, 0.12 / 0.7, 1 / 6], atol=1e-12)
        self.assertAlmostEqual(result.t_upper, 1 / (0.999 ** 4 * stats.w0_plus / 6), places=6)

    def test_rejections(self):
        model = create_model()
        stats = seed_stats(model, BumpSeed([1.0, 0, 0, 0], 0.05), samples=501)

        for eps in [0.0, 0.01, 0.5]:
            with self.assertRaises(error.InvalidParams):
                forecast(model, stats, epsilon=eps)

        linear = create_model(c111=0.0, c222=0.0)
        with self.assertRaises(error.NotGenuinelyNonlinear):
            forecast(linear, seed_stats(linear, BumpSeed([1.0, 0, 0, 0], 0.05), samples=501))

        flat = SeedStats(0.1, 0.0, 0.1, 0.0, 1.0, [0.1] * 4, [0.0] * 4, 0.0, 0)
        with self.assertRaises(error.ZeroPositivePart):
            forecast(model, flat)


class TestDetection(unittest.TestCase):
    def test_final_fit(self):
        times = np.linspace(0, 10, 101)
        slope, intercept, r_squared = final_fit(times, 2.0 - 0.5 * times)
        self.assertAlmostEqual(slope, -0.5, places=12)
        self.assertAlmostEqual(intercept, 2.0, places=10)
        self.assertAlmostEqual(r_squared, 1.0, places=12)

        with self.assertRaises(error.NoShockDetected):
            final_fit(times[:2], times[:2])

    def test_synthetic_focusing(self):
        times = np.linspace(0, 9.9, 100)
        fans = [
            synthetic_fan(1, times, 1 - times / 10),
            synthetic_fan(2, times, 1 - times / 20),
        ]

        report = detect_shock(fans, rho_stop=0.015)
        self.assertEqual(report.family, 1)
        self.assertAlmostEqual(report.t_obs, 9.9)
        self.assertAlmostEqual(report.t_extrap, 10.0, places=9)
        self.assertAlmostEqual(report.r_squared, 1.0, places=9)
        self.assertAlmostEqual(report.duality, 1.0, places=9)
        self.assertNotEqual(report.z_plus, -1.5)

    def test_no_focusing(self):
        times = np.linspace(0, 10, 50)
        fans = [synthetic_fan(1, times, np.ones_like(times))]

        with self.assertRaises(error.NoShockDetected):
            detect_shock(fans)

        with self.assertRaises(error.InvalidParams):
            detect_shock(fans, rho_stop=1.5)

    def test_scaling_law(self):
        # t_extrap goes like 1/W0+, so halving theta doubles it
        full = detect_shock(simple_wave_run()[4])
        half = detect_shock(simple_wave_run(theta=THETA / 2)[4])
        self.assertAlmostEqual(half.t_extrap / full.t_extrap, 2.0, delta=0.2)

    def test_simple_wave_shock(self):
        model, seed, exact, _, fans = simple_wave_run()
        report = detect_shock(fans)
        t_star = exact.shock_time()

        self.assertEqual(report.family, 1)
        self.assertLess(report.t_obs, t_star)
        self.assertAlmostEqual(report.t_extrap, t_star, delta=0.02 * t_star)
        self.assertGreater(report.r_squared, 0.99)
        self.assertLess(report.slope, 0)
        self.assertGreater(report.duality, 0.5)
        self.assertLess(report.duality, 2.0)
        self.assertLessEqual(abs(report.z_plus), 1.0)

        window = forecast(model, seed_stats(model, seed, samples=2001))
        self.assertTrue(validate_window(report, window, slack=0.05))
