import unittest

from shockform.suite import PropertySuite
from . import create_params


class TestPropertySuite(unittest.TestCase):
    def names(self, suite: PropertySuite) -> dict:
        return {r.name: r for r in suite.results}

    def test_demo_crystal(self):
        suite = PropertySuite(create_params(), samples=32)
        suite.run_model_checks()

        failed = [r.name for r in suite.results if not r.passed]
        self.assertEqual(failed, [])
        self.assertTrue(suite.passed)

        results = self.names(suite)
        for name in ["duality", "gamma_symmetry", "oracle_eigenvectors", "cjkl_oracle", "uniform_margin",
                     "genuine_nonlinearity", "invariant_round_trip", "char_speed_oracle"]:
            self.assertIn(name, results)

    def test_broken_sign_convention(self):
        suite = PropertySuite(create_params(), samples=32, break_sign_convention=True)
        suite.run_model_checks()

        results = self.names(suite)
        self.assertFalse(results["duality"].passed)
        # a negated covector is still a left eigenvector
        self.assertTrue(results["left_eigen_residual"].passed)
        self.assertTrue(results["unit_norm"].passed)
        self.assertFalse(suite.passed)

    def test_linear_control(self):
        suite = PropertySuite(create_params(c111=0.0, c222=0.0), samples=32)
        suite.run_model_checks()

        result = self.names(suite)["genuine_nonlinearity"]
        self.assertTrue(result.passed)
        self.assertTrue(result.expected_failure)
        self.assertTrue(suite.passed)

    def test_coupled_crystal(self):
        suite = PropertySuite(create_params(c112=0.01, c122=0.015), samples=32)
        suite.run_model_checks()

        results = self.names(suite)
        self.assertNotIn("invariant_round_trip", results)
        self.assertTrue(results["mu_product"].passed)
        self.assertTrue(suite.passed)

    def test_interface(self):
        suite = PropertySuite(create_params(), samples=32)
        suite.run_interface_checks((0.05, 0.04), 3, -1.0)

        results = self.names(suite)
        self.assertTrue(results["jump_conditions"].passed)
        self.assertTrue(results["quiet_boundary"].passed)
