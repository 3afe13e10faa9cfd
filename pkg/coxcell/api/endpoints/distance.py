"""
distance: CDF of the distance to the nearest base station
"""

import argparse

from coxcell.api.endpoints.common import add_common_arguments, merged_values, run_single
from coxcell.services.config_service import ConfigService
from coxcell.services.experiment_service import Quantity


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("distance", help="nearest-distance CDF over radii in km")
    add_common_arguments(parser, with_sweep=False)
    parser.add_argument("--grid", help="comma separated radii in km")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    values = merged_values(args)
    values["sweep"] = "radius"
    spec = ConfigService().build_spec(Quantity.DISTANCE, values)
    return run_single(args, spec)
