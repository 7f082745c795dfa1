import argparse
import logging

from . import Utility
from .. import error
from ..const import Artifact
from ..core import hyperbolicity_margin
from ..schema.report import ForecastReport
from ..shock import seed_stats, forecast


class Forecast(Utility):
    """
    A-priori shock window from seed statistics only; no solve.
    """

    def __init__(self, args: argparse.Namespace):
        super().__init__(args)
        self.logger = logging.getLogger('shockform.util.forecast')

    async def run(self):
        numerics = self.scenario.numerics
        model = self.scenario.system()
        seed = self.scenario.seed_profile()

        try:
            sigma = hyperbolicity_margin(model, model.ball_radius, numerics.samples, self.rng_seed, uniform=True)
        except error.NonHyperbolic as e:
            self.logger.warning(f"No hyperbolicity margin: {e}")
            sigma = None

        stats = seed_stats(model, seed)
        window = forecast(model, stats, numerics.epsilon, sigma if sigma and sigma > 0 else None)

        report = ForecastReport(window.as_dict(), status="ok", sigma=sigma)
        self.logger.info(f"Shock window [{window.t_lower:.6g}, {window.t_upper:.6g}]")
        await self.write_json(Artifact.FORECAST, report)
