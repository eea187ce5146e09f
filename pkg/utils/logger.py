import sys

from dotenv import load_dotenv
from loguru import logger

from config import LOGGING_CONFIG, get_env_var


def setup_logging(level=None, log_file=None):
    """Install the stderr sink (and an optional rotating file sink)"""
    load_dotenv()
    level = level or get_env_var("SPECLAB_LOG_LEVEL") or LOGGING_CONFIG["level"]
    log_file = log_file or LOGGING_CONFIG["file"]

    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format=LOGGING_CONFIG["format"])
    if log_file:
        logger.add(
            log_file,
            level=level.upper(),
            format=LOGGING_CONFIG["format"],
            rotation=LOGGING_CONFIG["max_file_size"],
            retention=LOGGING_CONFIG["backup_count"],
        )
    return logger
