"""
links: coverage conditioned on the user tier and the serving tier
"""

import argparse

from coxcell.api.endpoints.common import add_common_arguments, merged_values, run_single
from coxcell.core.model import LinkType
from coxcell.services.config_service import ConfigService
from coxcell.services.experiment_service import Quantity


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("links", help="V2V / I2V / V2I / I2I coverage")
    add_common_arguments(parser)
    parser.add_argument(
        "--link", required=True, type=str.upper, choices=[l.value for l in LinkType], help="link type"
    )
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    spec = ConfigService().build_spec(Quantity.LINKS, merged_values(args))
    return run_single(args, spec)
