import argparse
import logging
import math

import numpy as np

from . import Utility
from .. import error
from ..const import Artifact
from ..riemann import InterfaceScenario, require_decoupled
from ..schema.report import ExactReport
from ..schema.scenario import ExactSection


class Exact(Utility):
    """
    Field slices of the exact vacuum/crystal interface solution and its shock time.
    """

    def __init__(self, args: argparse.Namespace):
        super().__init__(args)
        self.logger = logging.getLogger('shockform.util.exact')

    async def run(self):
        params = self.scenario.params()
        require_decoupled(params)

        section = self.scenario.exact or ExactSection({})
        if section.amplitudes is None:
            section.amplitudes = [0.05, 0.04]
        if section.times is None:
            section.times = [0.5, 1.0, 2.0]

        interface = InterfaceScenario(params, section.amplitudes, section.power, section.x0)
        report = ExactReport(times=section.times, slices=[])

        if math.isfinite(interface.shock_time):
            report.shock_time = interface.shock_time
            report.status = "shock"
        else:
            self.logger.info("No shock: the transmitted characteristics never cross")
            report.status = "no_shock"
            report.message = "NoShock: the transmitted characteristics never cross"

        xs = section.xs()
        for index, t in enumerate(section.times):
            name = Artifact.EXACT_SLICE.format(index=index)
            try:
                rows = interface.slice(xs, t)
            except error.PostShockQuery as e:
                self.logger.warning(f"Skipping slice t={t}: {e}")
                continue

            await self.write_csv(name, Artifact.SLICE_COLUMNS, rows)
            report.slices.append(name)

        residuals = [np.abs(interface.jump_residual(t)).max() for t in section.times]
        report.jump_residual = float(max(residuals)) if residuals else 0.0
        self.logger.info(f"Exact solution: shock time {report.shock_time}, max jump residual {report.jump_residual:.3g}")

        await self.write_json(Artifact.EXACT, report)
