import asyncio
import logging
import math
import os
from argparse import Namespace
from concurrent.futures import ThreadPoolExecutor

import aiofiles

from .. import error
from ..const import ExitCode, Artifact
from ..schema import Schema
from ..schema.scenario import Scenario, load_scenario


class Utility:
    def __init__(self, args: Namespace):
        self.args = args
        self.exit_code = ExitCode.OK
        self.logger = logging.getLogger('shockform.util')
        self.scenario = None
        self.out_dir = None

    async def run(self):
        pass

    async def run_safe(self):
        try:
            self.scenario = self.load()
            self.out_dir = getattr(self.args, "out", None) or self.scenario.outputs.directory
            await self.run()
        except asyncio.CancelledError:
            pass
        except error.ConfigError as e:
            self.logger.error(f"Configuration error: {e}")
            self.exit_code = ExitCode.CONFIG
        except error.ShockformError as e:
            self.logger.error(f"{type(e).__name__}: {e}")
            self.exit_code = ExitCode.RUNTIME

    def load(self) -> Scenario:
        return load_scenario(self.args.config)

    @property
    def threads(self) -> int:
        return max(1, getattr(self.args, "threads", None) or os.cpu_count() or 1)

    @property
    def rng_seed(self) -> int:
        return getattr(self.args, "seed", None) or 0

    async def fan_out(self, fn, jobs: list) -> list:
        """
        Run fn(*job) for every job on a thread pool and gather the results in job order.
        """
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(await asyncio.gather(*[loop.run_in_executor(pool, fn, *job) for job in jobs]))

    def path(self, name: str) -> str:
        os.makedirs(self.out_dir, exist_ok=True)
        return os.path.join(self.out_dir, name)

    async def write_csv(self, name: str, columns: list[str], rows):
        lines = [",".join(columns)]
        for row in rows:
            lines.append(",".join(format_value(v) for v in row))

        async with aiofiles.open(self.path(name), "w") as f:
            await f.write("\n".join(lines) + "\n")

        self.logger.debug(f"Wrote {len(lines) - 1} rows to {name}")

    async def write_json(self, name: str, report: Schema):
        async with aiofiles.open(self.path(name), "w") as f:
            await f.write(report.marshal() + "\n")

        self.logger.debug(f"Wrote {name}")


def format_value(value) -> str:
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return Artifact.FLOAT_FORMAT.format(value)
