"""
compare: run both engines on one sweep and grade the largest z-score
"""

import argparse

from coxcell.api.endpoints.common import add_common_arguments, merged_values, run_specs
from coxcell.core.model import LinkType
from coxcell.services.config_service import ConfigService
from coxcell.services.experiment_service import QUANTITY_EVENTS, Engine, Quantity


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("compare", help="analytic vs Monte Carlo; exit 1 when max |z| is too large")
    parser.add_argument("quantity", choices=[q.value for q in Quantity], help="what to compare")
    add_common_arguments(parser)
    events = sorted({event for events in QUANTITY_EVENTS.values() for event in events})
    parser.add_argument("--event", choices=events, help="event for assoc and coverage")
    parser.add_argument("--link", type=str.upper, choices=[l.value for l in LinkType], help="link type for links")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    quantity = Quantity(args.quantity)
    values = merged_values(args)
    values["engine"] = Engine.BOTH
    if quantity is Quantity.DISTANCE:
        values["sweep"] = "radius"
    spec = ConfigService().build_spec(quantity, values)
    return run_specs([spec], compare=True)
