"""
qpart - Hybrid quantum-classical graph partitioning
Balanced bipartitions and nested dissection orderings from a coarsen, solve, lift loop.
"""

import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from qpart.commands.router import cli_router
from qpart.core.config import settings
from qpart.core.errors import InputError, QpartError
from qpart.core.logging import configure_logging
from qpart.core.monitor import RunMonitor
from qpart.schemas.report import ErrorDocument

logger = logging.getLogger("qpart")


def _validation_message(e: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
    )


def _fail(document: ErrorDocument) -> int:
    sys.stdout.write(document.model_dump_json() + "\n")
    return document.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the process exit code"""
    parser = cli_router.build_parser(
        description=f"{settings.APP_NAME} {settings.VERSION}: hybrid quantum-classical graph partitioning"
    )
    try:
        args = parser.parse_args(argv)
    except InputError as e:
        return _fail(ErrorDocument(**e.to_document()))

    configure_logging(args.log_level, args.log_format)
    try:
        with RunMonitor(args.command):
            args.handler(args)
    except QpartError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return _fail(ErrorDocument(**e.to_document()))
    except ValidationError as e:
        message = _validation_message(e)
        logger.error("Invalid configuration: %s", message)
        return _fail(ErrorDocument(error="ValidationError", message=message, exit_code=InputError.exit_code))
    except Exception as e:
        logger.exception("Unexpected failure")
        return _fail(ErrorDocument(error=type(e).__name__, message=str(e), exit_code=QpartError.exit_code))
    return 0

