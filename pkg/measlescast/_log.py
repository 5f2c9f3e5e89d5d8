__all__ = ["logger"]
import logging

logger = logging.getLogger(__package__)
# silent unless the application or the command line configures logging
logger.addHandler(logging.NullHandler())
