import io
import logging
import sys

from saddlecount.logs import SuppressProgressFilter, configure_logging, progress


def test_reconfigure_after_stderr_was_closed(monkeypatch):
    first = io.StringIO()
    monkeypatch.setattr(sys, "stderr", first)
    configure_logging("INFO")
    first.close()

    second = io.StringIO()
    monkeypatch.setattr(sys, "stderr", second)
    logger = configure_logging("INFO")
    logger.info("[TEST] after swap")
    assert "[TEST] after swap" in second.getvalue()


def test_single_handler_and_filter(monkeypatch):
    monkeypatch.setattr(sys, "stderr", io.StringIO())
    configure_logging("INFO")
    logger = configure_logging("INFO")
    ours = [item for item in logger.handlers if getattr(item, "_saddlecount", False)]
    assert len(ours) == 1
    assert sum(isinstance(item, SuppressProgressFilter) for item in ours[0].filters) == 1


def test_progress_only_at_debug(monkeypatch):
    stream = io.StringIO()
    monkeypatch.setattr(sys, "stderr", stream)
    logger = configure_logging("INFO")
    progress(logger, "[TEST] chunk %d", 1)
    assert "chunk 1" not in stream.getvalue()
    logger = configure_logging("DEBUG")
    progress(logger, "[TEST] chunk %d", 2)
    assert "chunk 2" in stream.getvalue()
    logging.getLogger("saddlecount").setLevel("INFO")
