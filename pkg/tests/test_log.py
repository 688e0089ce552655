"""
unit tests for promisecalc.log
"""
import logging

from promisecalc.log import LOG_DEBUG, LOG_ERROR, LOG_WARNING, ROOT_LOGGER, LogManager, Logger


def test_log_01():
    """test LogManager - single instance shared by loggers"""
    assert Logger("One").manager is Logger("Two").manager
    assert LogManager.get_instance() is LogManager.get_instance()


def test_log_02():
    """test LogManager.level - maps onto the package logger"""
    manager = LogManager.get_instance()
    previous = manager.level
    try:
        manager.level = LOG_DEBUG
        assert logging.getLogger(ROOT_LOGGER).level == logging.DEBUG
        manager.level = LOG_ERROR
        assert logging.getLogger(ROOT_LOGGER).level == logging.ERROR
        manager.level = 7
        assert manager.level == LOG_ERROR
    finally:
        manager.level = previous


def test_log_03(caplog):
    """test Logger - messages carry the component name"""
    manager = LogManager.get_instance()
    previous = manager.level
    root = logging.getLogger(ROOT_LOGGER)
    root.addHandler(caplog.handler)
    try:
        manager.level = LOG_WARNING
        log = Logger("Probe")
        log.info("hidden")
        log.warning("shown %d", 1)
        try:
            raise ValueError("boom")
        except ValueError as e:
            log.exc(e, "failed")
    finally:
        root.removeHandler(caplog.handler)
        manager.level = previous
    records = [(r.name, r.levelname, r.getMessage()) for r in caplog.records]
    assert records[0] == ("promisecalc.Probe", "WARNING", "shown 1")
    assert records[1][1:] == ("ERROR", "failed")
    assert caplog.records[1].exc_info[0] is ValueError
    assert len(records) == 2
