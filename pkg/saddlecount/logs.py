import logging
import sys

PROGRESS_ATTR = "progress"


class SuppressProgressFilter(logging.Filter):
    """Drops per-chunk progress records unless the logger runs at DEBUG."""

    def filter(self, record: logging.LogRecord) -> bool:
        if not getattr(record, PROGRESS_ATTR, False):
            return True
        return logging.getLogger("saddlecount").getEffectiveLevel() <= logging.DEBUG


def configure_logging(level: str = "INFO") -> logging.Logger:
    logger = logging.getLogger("saddlecount")
    logger.setLevel(level)
    if not any(getattr(item, "_saddlecount", False) for item in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
        handler._saddlecount = True
        logger.addHandler(handler)
    for handler in logger.handlers:
        # the previous stream may already be closed, so no flush through setStream
        if getattr(handler, "_saddlecount", False) and handler.stream is not sys.stderr:
            handler.stream = sys.stderr
        if not any(isinstance(item, SuppressProgressFilter) for item in handler.filters):
            handler.addFilter(SuppressProgressFilter())
    return logger


def progress(logger: logging.Logger, message: str, *args) -> None:
    logger.info(message, *args, extra={PROGRESS_ATTR: True})
