import logging
import os

from rich.console import Console
from rich.logging import RichHandler

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_LEVEL_ENV = "ESTLAB_LOG_LEVEL"


def default_level() -> int:
    """Level from ESTLAB_LOG_LEVEL, WARNING when unset or unknown."""
    name = os.environ.get(LOG_LEVEL_ENV, "WARNING").upper()
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.WARNING


def configure_logger(name=__name__, level=None, log_file=None):
    """Configures a logger writing to stderr and, optionally, to a file."""
    logger = logging.getLogger(name)
    logger.setLevel(default_level() if level is None else level)
    logger.propagate = False

    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(
            console=Console(stderr=True), show_path=False, show_time=False
        )
        handler.setFormatter(logging.Formatter("%(name)s - %(message)s"))
        logger.addHandler(handler)

    if log_file and not any(
        isinstance(h, logging.FileHandler) and h.baseFilename == os.path.abspath(log_file)
        for h in logger.handlers
    ):
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(file_handler)

    return logger


def set_level(level: int) -> None:
    """Applies a level to every estlab logger created so far."""
    for name in list(logging.root.manager.loggerDict):
        if name.split(".")[0] in ("managers", "commands", "utils", "estlab", "datasets"):
            logging.getLogger(name).setLevel(level)
