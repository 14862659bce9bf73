import logging

logger = logging.getLogger("vpbounds")

_FORMAT = "%(asctime)s %(levelname)s %(message)s"


def configure_logging(level: str | int = "INFO") -> None:
    """Configure root logging for the CLI and the HTTP entry points."""
    logging.basicConfig(level=level, format=_FORMAT)
    logger.setLevel(level)
