import asyncio
import logging
import sys
from typing import List, Optional

from cli import main as cli_main
from config.logging_conf import configure_logging
from config.settings import get_settings


async def main(argv: Optional[List[str]] = None) -> int:
    settings = get_settings()
    configure_logging(
        settings.log_level,
        log_file=settings.log_file,
        log_max_bytes=settings.log_max_bytes,
        log_backup_count=settings.log_backup_count,
    )
    logger = logging.getLogger(__name__)
    code = await cli_main(argv, settings)
    logger.debug("Exit code %d", code)
    return code


def run_cli() -> None:
    sys.exit(asyncio.run(main(sys.argv[1:])))


if __name__ == "__main__":
    run_cli()
