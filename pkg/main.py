"""
coxcell - coverage of planar and road-borne cellular networks
Command line entry point
"""

import sys

from coxcell.core.logging import setup_logging
from coxcell.api.routes import dispatch

# Setup logging
logger = setup_logging()


def cli() -> int:
    """Console script entry point"""
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(cli())
