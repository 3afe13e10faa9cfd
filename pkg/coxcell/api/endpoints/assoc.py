"""
assoc: probability that the nearest base station is planar or vehicular
"""

import argparse

from coxcell.api.endpoints.common import add_common_arguments, merged_values, run_single
from coxcell.services.config_service import ConfigService
from coxcell.services.experiment_service import Quantity


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("assoc", help="association probabilities (default sweep: mu_b)")
    add_common_arguments(parser)
    parser.add_argument("--event", choices=("planar", "vehicular"), help="tier of the nearest BS (default planar)")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    spec = ConfigService().build_spec(Quantity.ASSOCIATION, merged_values(args))
    return run_single(args, spec)
