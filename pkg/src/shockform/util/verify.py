import argparse
import logging

from .simulate import Simulate
from .. import error
from ..const import Artifact, ExitCode
from ..schema.report import VerifyReport
from ..suite import PropertySuite, result


class Verify(Simulate):
    """
    Model, oracle and run properties of a scenario; exits 1 when any of them fails.
    """

    def __init__(self, args: argparse.Namespace):
        super().__init__(args)
        self.logger = logging.getLogger('shockform.util.verify')
        self.suite = None

    async def run(self):
        settings = self.scenario.verify
        params = self.scenario.params()

        self.suite = PropertySuite(params, self.scenario.system(), settings.samples, self.rng_seed,
                                   settings.break_sign_convention)
        self.suite.run_model_checks()

        if self.scenario.exact is not None and params.decoupled:
            exact = self.scenario.exact
            self.suite.run_interface_checks(exact.amplitudes, exact.power, exact.x0)

        try:
            await self.simulate()
            self.suite.run_simulation_checks(self)
        except error.ShockformError as e:
            self.logger.error(f"Simulation failed: {type(e).__name__}: {e}")
            self.suite.results.append(result("simulation", float("nan"), float("nan"), passed=False,
                                             message=f"{type(e).__name__}: {e}"))

        passed = self.suite.passed
        report = VerifyReport(status="pass" if passed else "fail", passed=passed, results=self.suite.results)
        await self.write_json(Artifact.VERIFY, report)

        failed = [r.name for r in self.suite.results if not r.passed]
        if failed:
            self.logger.error(f"{len(failed)} properties failed: {', '.join(failed)}")
            self.exit_code = ExitCode.VERIFY_FAILED
        else:
            self.logger.info(f"All {len(self.suite.results)} properties passed")
