#!/usr/bin/env python3

import asyncio
import logging
import argparse
from signal import SIGINT, SIGTERM

from shockform.util import Utility
from shockform.util.simulate import Simulate
from shockform.util.forecast import Forecast
from shockform.util.exact import Exact
from shockform.util.verify import Verify

parser = argparse.ArgumentParser(description='Shock formation toolkit for 1+1 dimensional hyperbolic systems')

parser.add_argument('-v', '--verbose', dest='verbose', action='store_true',
                    help='increase logging verbosity')

parser.add_argument('-q', '--quiet', dest='quiet', action='store_true',
                    help='decrease logging verbosity')

subparsers = parser.add_subparsers(dest="cmd")


def add_common(sub):
    sub.add_argument('-c', '--config', dest="config", action='store', required=True,
                     help="scenario file (TOML)")
    sub.add_argument('-o', '--out', dest="out", action='store',
                     help="output directory; defaults to [outputs] directory of the scenario")
    sub.add_argument('-t', '--threads', dest="threads", action='store', type=int,
                     help="worker threads for characteristic tracing; defaults to the CPU count")
    sub.add_argument('-s', '--seed', dest="seed", action='store', type=int, default=0,
                     help="seed for the quasi-random state sampler; default 0")


add_common(subparsers.add_parser('simulate', help='grid solve, trace characteristics and detect the shock'))
add_common(subparsers.add_parser('forecast', help='a-priori shock window from the seed'))
add_common(subparsers.add_parser('exact', help='exact vacuum/crystal interface solution (decoupled crystal)'))
add_common(subparsers.add_parser('verify', help='run the property suite'))


def safe_exit():
    for task in asyncio.all_tasks():
        task.cancel()


if __name__ == '__main__':
    args = parser.parse_args()

    if args.verbose:
        logging.basicConfig(level=logging.DEBUG)
    elif args.quiet:
        logging.basicConfig(level=logging.WARNING)
    else:
        logging.basicConfig(level=logging.INFO)

    app = None
    if args.cmd == "simulate":
        app = Simulate(args)
    elif args.cmd == "forecast":
        app = Forecast(args)
    elif args.cmd == "exact":
        app = Exact(args)
    elif args.cmd == "verify":
        app = Verify(args)
    else:
        parser.print_usage()
        exit(2)

    if isinstance(app, Utility):
        loop = asyncio.new_event_loop()
        asyncio.set_event_loop(loop)
        app_task = loop.create_task(app.run_safe())

        # graceful exit on signal intercept
        for signal in [SIGINT, SIGTERM]:
            loop.add_signal_handler(signal, safe_exit)

        loop.run_until_complete(app_task)
        exit(app.exit_code)
