import logging
import sys

from services.batch_service import run
from services.command_line_service import parse_args


def main():
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")

    # Get command line arguments
    config = parse_args()

    sys.exit(run(config))


if __name__ == "__main__":
    main()
