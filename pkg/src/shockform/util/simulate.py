import argparse
import logging

from . import Utility
from .. import error
from ..const import Artifact, Defaults
from ..core import hyperbolicity_margin
from ..schema.report import ShockSummary, SeedStatsReport
from ..seed import gradient_cap
from ..shock import seed_stats, forecast, detect_shock, validate_window
from ..solver import reference_solve
from ..tracer import trace_characteristics, align_fans, sup_diagnostics


class Simulate(Utility):
    """
    Grid solve, characteristic tracing of every family, sup diagnostics and shock detection.
    """

    def __init__(self, args: argparse.Namespace):
        super().__init__(args)
        self.logger = logging.getLogger('shockform.util.simulate')

        self.model = None
        self.seed = None
        self.sigma = None
        self.stats = None
        self.forecast = None
        self.solution = None
        self.fans = None
        self.diagnostics = None
        self.report = None
        self.summary = None

    async def run(self):
        await self.simulate()
        await self.write_artifacts()

    async def simulate(self):
        numerics = self.scenario.numerics
        self.model = self.scenario.system()
        self.seed = self.scenario.seed_profile()
        self.summary = ShockSummary(rho_stop=numerics.rho_stop, epsilon=numerics.epsilon)

        self.logger.info(f"Model {self.model}, seed {self.seed}")

        try:
            self.sigma = hyperbolicity_margin(self.model, self.model.ball_radius, numerics.samples, self.rng_seed,
                                              uniform=True)
            self.summary.sigma = self.sigma
        except (error.NonHyperbolic, error.NonPositiveMargin) as e:
            self.logger.warning(f"No hyperbolicity margin: {e}")

        try:
            self.stats = seed_stats(self.model, self.seed)
            self.forecast = forecast(self.model, self.stats, numerics.epsilon,
                                     self.sigma if self.sigma and self.sigma > 0 else None)
            self.summary.hydrate_dict(self.forecast.as_dict())
        except (error.ZeroSeed, error.NotGenuinelyNonlinear, error.ZeroPositivePart) as e:
            self.logger.warning(f"No forecast: {e}")
            self.summary.message = f"{type(e).__name__}: {e}"

        t_end = numerics.t_end
        if t_end is None:
            if self.forecast is None:
                t_end = Defaults.T_END
                self.logger.info(f"No forecast window, running to the default t_end = {t_end:.6g}")
            else:
                t_end = 1.25 * self.forecast.t_upper
                self.logger.info(f"Running to t_end = {t_end:.6g} (1.25 x T_upper)")

        self.solution = await self.fan_out(self.solve, [(t_end,)])
        self.solution = self.solution[0]

        z = numerics.z_grid()
        jobs = [(self.model, self.solution, i, z, self.seed, numerics.rho_stop, numerics.substeps)
                for i in range(self.model.dimension)]
        self.fans = align_fans(await self.fan_out(trace_characteristics, jobs))
        self.diagnostics = sup_diagnostics(self.model, self.fans, self.solution)

        if self.solution.event is not None:
            self.summary.steepness = self.solution.event.as_dict()

        try:
            self.report = detect_shock(self.fans, numerics.rho_stop)
            self.summary.hydrate_dict(self.report.as_dict())
            self.summary.status = "shock"
            if self.forecast is not None:
                self.summary.verdict = validate_window(self.report, self.forecast, numerics.slack)
                self.logger.info(f"Shock at t_extrap={self.report.t_extrap:.6g}; window verdict {self.summary.verdict}")
        except error.NoShockDetected as e:
            self.logger.info(f"No shock detected: {e}")
            self.summary.status = "no_shock"
            self.summary.message = f"NoShockDetected: {e}"

    def solve(self, t_end: float):
        numerics = self.scenario.numerics
        return reference_solve(
            self.model, self.seed, t_end,
            cfl=numerics.cfl,
            dx=numerics.dx,
            limiter=numerics.limiter,
            levels=numerics.levels,
            cap=gradient_cap(self.seed, numerics.gradient_cap_factor),
            domain=tuple(numerics.domain) if numerics.domain else None,
            tvb_factor=numerics.tvb_factor,
        )

    async def write_artifacts(self):
        outputs = self.scenario.outputs

        if outputs.fans:
            for fan in self.fans:
                await self.write_csv(Artifact.FAN.format(family=fan.family), Artifact.FAN_COLUMNS, fan.rows())

        if outputs.diagnostics:
            await self.write_csv(Artifact.DIAGNOSTICS, Artifact.DIAGNOSTICS_COLUMNS, self.diagnostics.rows())

        if outputs.energy and self.solution.energy is not None:
            await self.write_csv(Artifact.ENERGY, Artifact.ENERGY_COLUMNS, zip(self.solution.times, self.solution.energy))

        if outputs.seed_stats and self.stats is not None:
            await self.write_json(Artifact.SEED_STATS, SeedStatsReport(self.stats.as_dict(), status="ok"))

        if outputs.shock:
            await self.write_json(Artifact.SHOCK, self.summary)
