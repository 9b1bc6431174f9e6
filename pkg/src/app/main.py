import asyncio
import sys
from collections.abc import Sequence

from pydantic import ValidationError

from .commands import build_parser
from .core.exceptions.numeric_exceptions import NonConvergenceError
from .core.exceptions.protocol_exceptions import SecureGraphError
from .core.logger import logging

logger = logging.getLogger(__name__)

EXIT_NON_CONVERGENCE = 2
EXIT_FAILURE = 3


def main(argv: Sequence[str] | None = None) -> int:
    """Exit codes: 0 success, 1 conformance failure, 2 non-convergent spectrum, 3 any other error."""
    args = build_parser().parse_args(argv)
    try:
        return asyncio.run(args.handler(args))
    except NonConvergenceError as e:
        logger.error(f"Non-convergent spectrum: {e.message}")
        return EXIT_NON_CONVERGENCE
    except SecureGraphError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        return EXIT_FAILURE
    except (ValidationError, OSError) as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
