import json
import math
import os
import tempfile
import unittest

import numpy as np

from shockform.error import Malformed, CoupledParamsRejected
from shockform.schema.report import Report, ShockSummary, VerifyReport, PropertyResult
from shockform.schema.scenario import Scenario, validate, load_scenario

MINIMAL = {"seed": {"theta": 0.1}}

DEMO = """
[model]
k1 = 0.81
k2 = 0.49
c111 = 0.05
c222 = 0.04

[seed]
kind = "simple_wave"
theta = 0.12

[numerics]
dx = 0.05
levels = 200
z_points = 101

[outputs]
directory = "demo"
"""


class TestScenario(unittest.TestCase):
    def test_defaults(self):
        scenario = validate(MINIMAL)

        self.assertEqual(scenario.model.kind, "crystal")
        self.assertEqual(scenario.seed.kind, "bump")
        self.assertEqual(scenario.seed.theta, 0.1)
        self.assertIsNone(scenario.numerics.t_end)
        self.assertIsNone(scenario.exact)
        self.assertEqual(scenario.verify.samples, 256)
        self.assertFalse(scenario.verify.break_sign_convention)

        tests = [
            [["numerics", "dx"], 0.02],
            [["numerics", "levels"], 400],
            [["model", "k1"], 0.81],
            [["outputs", "directory"], "out"],
            ["seed", scenario.seed],
        ]

        for key, expected in tests:
            self.assertEqual(scenario.get(key), expected)

        self.assertEqual(scenario.get(["numerics", "t_end"], 25.0), 25.0)
        self.assertEqual(scenario.get(["nothing", "here"], "x"), "x")

        z = scenario.numerics.z_grid()
        self.assertEqual(len(z), 401)
        self.assertEqual((z[0], z[-1]), (-1.5, 1.5))

    def test_malformed(self):
        tests = [
            {},
            {"seed": {}},
            {"seed": {"theta": -0.1}},
            {"seed": {"theta": 0.1, "kind": "sawtooth"}},
            {"seed": {"theta": 0.1, "amplitudes": [1.0, 0.0, 0.0]}},
            {"seed": {"theta": 0.1, "power": 2}},
            {"seed": {"theta": 0.1}, "model": {"k1": 0.49, "k2": 0.81}},
            {"seed": {"theta": 0.1}, "model": {"k1": 0.5, "k2": 0.5}},
            {"seed": {"theta": 0.1}, "model": {"colour": "blue"}},
            {"seed": {"theta": 0.1, "kind": "simple_wave"}, "model": {"kind": "vacuum"}},
            {"seed": {"theta": 0.1}, "numerics": {"limiter": "superbee"}},
            {"seed": {"theta": 0.1}, "numerics": {"epsilon": 0.02}},
            {"seed": {"theta": 0.1}, "numerics": {"rho_stop": 1.2}},
            {"seed": {"theta": 0.1}, "numerics": {"cfl": 1.5}},
            {"seed": {"theta": 0.1}, "numerics": {"dx": 0.0}},
            {"seed": {"theta": 0.1}, "numerics": {"domain": [5.0, -5.0]}},
            {"seed": {"theta": 0.1}, "numerics": {"z_min": 1.0, "z_max": -1.0}},
            {"seed": {"theta": 0.1}, "exact": {"x0": 0.5}},
            {"seed": {"theta": 0.1}, "exact": {"amplitudes": [0.1]}},
            {"seed": {"theta": 0.1}, "surprise": {}},
        ]

        for raw in tests:
            with self.assertRaises(Malformed, msg=f"{raw} should be rejected"):
                validate(raw)

    def test_system(self):
        scenario = validate({"seed": {"theta": 0.05, "amplitudes": [1.0, 0.0, 0.0, 0.0]}, "model": {"h_fraction": 1.0}})
        model = scenario.system()
        self.assertAlmostEqual(model.ball_radius, 0.124, delta=0.002)
        self.assertEqual(scenario.seed_profile().kind, "bump")

        scenario = validate({"seed": {"theta": 0.05}, "model": {"kind": "vacuum"}})
        self.assertTrue(scenario.params().linear)
        self.assertEqual(scenario.system().ball_radius, 1.0)

        scenario = validate({"seed": {"theta": 0.05, "kind": "simple_wave"}, "model": {"c112": 0.01}})
        with self.assertRaises(CoupledParamsRejected):
            scenario.seed_profile()

    def test_load(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "demo.toml")
            with open(path, "w") as f:
                f.write(DEMO)

            scenario = load_scenario(path)
            self.assertEqual(scenario.seed.kind, "simple_wave")
            self.assertEqual(scenario.numerics.z_points, 101)
            self.assertEqual(scenario.outputs.directory, "demo")

            bad = os.path.join(tmp, "bad.toml")
            with open(bad, "w") as f:
                f.write("[seed\ntheta = ")

            with self.assertRaises(Malformed):
                load_scenario(bad)

            with self.assertRaises(Malformed):
                load_scenario(os.path.join(tmp, "missing.toml"))


class TestReports(unittest.TestCase):
    def test_bootstrap(self):
        Report()

        with self.assertRaises(Malformed, msg="Invalid type for schema bootstrap"):
            Report(32)

        with self.assertRaises(Malformed):
            Report("{not json")

        reports = [
            Report(status="ok", message="done"),
            Report({"status": "ok", "message": "done"}),
            Report('{"status": "ok", "message": "done"}'),
        ]

        for report in reports:
            self.assertEqual(report.status, "ok")
            self.assertEqual(report.message, "done")

    def test_marshal(self):
        summary = ShockSummary(status="shock", t_extrap=math.nan, t_upper=math.inf, family=np.int64(1),
                               c_diagonal=np.array([-1 / 6, -0.1714]), verdict=np.bool_(True))
        data = json.loads(summary.marshal())

        self.assertEqual(list(data.keys()), sorted(data.keys()))
        self.assertIsNone(data["t_extrap"])
        self.assertIsNone(data["t_upper"])
        self.assertIsNone(data["duality"])
        self.assertEqual(data["family"], 1)
        self.assertIs(data["verdict"], True)
        self.assertEqual(len(data["c_diagonal"]), 2)

        # identical content gives identical bytes
        self.assertEqual(summary.marshal(), ShockSummary(summary.as_dict()).marshal())

    def test_nested(self):
        report = VerifyReport(passed=False, results=[
            PropertyResult(name="duality", passed=False, measured=2.0, threshold=1e-10),
        ])
        data = json.loads(report.marshal())
        self.assertEqual(data["results"][0]["name"], "duality")
        self.assertFalse(data["results"][0]["expected_failure"])
