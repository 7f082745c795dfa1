import unittest

import numpy as np

from shockform import error
from shockform.crystal import CrystalParams, crystal_model
from shockform.riemann import SimpleWave
from shockform.seed import BumpSeed, SimpleWaveSeed, zero_seed
from shockform.solver import reference_solve, limited_slopes, default_domain
from . import create_model, create_params, simple_wave_run, THETA


class TestLimiter(unittest.TestCase):
    def test_slopes(self):
        left = np.array([1.0, 1.0, -1.0, 0.5])
        right = np.array([3.0, 0.2, 1.0, 0.5])

        np.testing.assert_allclose(limited_slopes(left, right, "mc"), [2.0, 0.4, 0.0, 0.5])
        np.testing.assert_allclose(limited_slopes(left, right, "minmod"), [1.0, 0.2, 0.0, 0.5])
        np.testing.assert_array_equal(limited_slopes(left, right, "none"), 0.0)

        # centred slopes survive below the bound, mc applies above it
        np.testing.assert_allclose(limited_slopes(left, right, "tvb", bound=0.6), [2.0, 0.6, 0.0, 0.5])
        np.testing.assert_allclose(limited_slopes(left, right, "tvb", bound=0.0), limited_slopes(left, right, "mc"))

        with self.assertRaises(error.InvalidParams):
            limited_slopes(left, right, "superbee")


class TestReferenceSolve(unittest.TestCase):
    def test_zero_seed(self):
        model = create_model()
        sol = reference_solve(model, zero_seed(4), 5.0, dx=0.1, levels=10, domain=(-5.0, 5.0))
        self.assertEqual(sol.states.shape, (11, 100, 4))
        np.testing.assert_array_equal(sol.states, 0.0)
        self.assertIsNone(sol.event)

    def test_read_only(self):
        sol = reference_solve(create_model(), zero_seed(4), 1.0, dx=0.1, levels=2, domain=(-2.0, 2.0))
        with self.assertRaises(ValueError):
            sol.states[0, 0, 0] = 1.0

    def test_invalid(self):
        model = create_model()
        seed = BumpSeed([1.0, 0, 0, 0], 0.05)

        for cfl in [0.0, 1.5]:
            with self.assertRaises(error.CFLViolation):
                reference_solve(model, seed, 1.0, cfl=cfl, dx=0.1, levels=2)

        with self.assertRaises(error.InvalidParams):
            reference_solve(model, seed, -1.0, dx=0.1, levels=2)

        with self.assertRaises(error.InvalidParams):
            reference_solve(model, BumpSeed([1.0, 0], 0.05), 1.0, dx=0.1, levels=2)

        with self.assertRaises(error.OutOfBall):
            reference_solve(model, BumpSeed([1.0, 0, 0, 0], 0.5), 1.0, dx=0.1, levels=2)

    def test_vacuum_transport(self):
        # the vacuum is linear: D_y + B_z moves right and D_y - B_z left at unit speed
        model = crystal_model(CrystalParams.vacuum())
        seed = BumpSeed([0.5, 0.0, 0.0, 0.5], 0.1)
        sol = reference_solve(model, seed, 2.0, dx=0.01, levels=4, domain=(-4.0, 4.0))

        expected = seed.value(sol.x - 2.0)
        np.testing.assert_allclose(sol.states[-1], expected, atol=2e-3)

    def test_conservation(self):
        model = create_model()
        seed = BumpSeed([1.0, 0.5, 0.0, 0.0], 0.05)
        sol = reference_solve(model, seed, 10.0, dx=0.025, levels=20, domain=(-15.0, 15.0))

        self.assertEqual(sol.scheme, "muscl-llf")
        drift = np.abs(sol.energy - sol.energy[0]).max() / sol.energy[0]
        self.assertLess(drift, 1e-2)

        # nothing outruns the fastest family
        reach = 1 + 0.95 * 10.0
        outside = np.abs(sol.x) > reach + 1.0
        self.assertLess(np.abs(sol.states[-1][outside]).max(), 1e-5)

    def test_upwind_scheme(self):
        model = create_model()
        seed = BumpSeed([1.0, 0.0, 0.0, 0.0], 0.05)
        muscl = reference_solve(model, seed, 2.0, dx=0.02, levels=4, domain=(-5.0, 5.0))
        upwind = reference_solve(model, seed, 2.0, dx=0.02, levels=4, domain=(-5.0, 5.0), conservative=False)

        self.assertEqual(upwind.scheme, "upwind-primitive")
        np.testing.assert_allclose(upwind.states[-1], muscl.states[-1], atol=5e-4)

    def test_gradient_cap(self):
        model = create_model()
        seed = BumpSeed([1.0, 0, 0, 0], 0.05)
        sol = reference_solve(model, seed, 4.0, dx=0.05, levels=8, domain=(-6.0, 6.0), cap=1e-3)

        self.assertIsNotNone(sol.event)
        self.assertEqual(len(sol.times), 2)
        self.assertGreater(sol.event.gradient, 1e-3)

    def test_convergence_order(self):
        # max-norm error under mesh halving against the exact simple wave, well before the shock
        params = create_params()
        model = crystal_model(params)
        seed = SimpleWaveSeed(params, THETA)
        wave = SimpleWave(params, seed)
        t = 10.0

        spacings = [0.04, 0.02, 0.01]
        errors = []
        for dx in spacings:
            sol = reference_solve(model, seed, t, dx=dx, levels=1, domain=(-4.0, 14.0))
            window = (sol.x > -1.5) & (sol.x < 11.5)
            exact = wave.evaluate(sol.x[window], t)
            errors.append(np.abs(sol.states[-1][window] - exact).max())

        order = np.polyfit(np.log(spacings), np.log(errors), 1)[0]
        self.assertGreaterEqual(order, 1.7)
        self.assertLessEqual(order, 2.2)

    def test_limiter_clips_extrema(self):
        # plain mc flattens the crest of a smooth wave, so it loses to tvb in the max norm
        params = create_params()
        model = crystal_model(params)
        seed = SimpleWaveSeed(params, THETA)
        wave = SimpleWave(params, seed)

        errors = {}
        for limiter in ["tvb", "mc"]:
            sol = reference_solve(model, seed, 10.0, dx=0.02, levels=1, domain=(-4.0, 14.0), limiter=limiter)
            errors[limiter] = np.abs(sol.states[-1] - wave.evaluate(sol.x, 10.0)).max()

        self.assertLess(errors["tvb"], errors["mc"])

    def test_default_domain(self):
        lo, hi = default_domain(create_model(), 10.0)
        self.assertAlmostEqual(lo, -1.5 - 9.9 - 2.0)
        self.assertAlmostEqual(hi, 1.5 + 9.9 + 2.0)


class TestSimpleWaveRun(unittest.TestCase):
    def test_shock_resolved_on_grid(self):
        model, seed, exact, sol, _ = simple_wave_run()

        self.assertIsNone(sol.event)
        self.assertLess(np.linalg.norm(sol.states, axis=-1).max(), model.ball_radius)

        # pre-shock the grid tracks the exact solution
        n = sol.level(0.5 * exact.shock_time())
        window = (sol.x > -1.5) & (sol.x < 30.0)
        reference = exact.evaluate(sol.x[window], float(sol.times[n]))
        self.assertLess(np.abs(sol.states[n][window] - reference).max(), 5e-3)
