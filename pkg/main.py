"""Command-line entry point"""

import logging
import sys
from typing import List, Optional

from app.cli import HANDLERS, build_parser, settings_overrides
from app.config.settings import load_settings
from app.errors import InterferenceToolkitError

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, resolve settings and run one command

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        Exit code: 0 success or no detection, 10 detection, 2 input error, 3 consistency error
    """
    args = build_parser().parse_args(argv)
    verbose = getattr(args, "verbose", False)

    try:
        run_settings = load_settings(args.config, settings_overrides(args))
        level = logging.DEBUG if verbose else run_settings.LOG_LEVEL.upper()
        logging.getLogger().setLevel(level)
        return HANDLERS[args.handler](args, run_settings)
    except InterferenceToolkitError as e:
        logger.error(str(e), exc_info=verbose)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
