import logging

# Log levels aligned with syslog severity levels
LOG_CRITICAL = 0    # Critical: critical conditions
LOG_ERROR = 1       # Error: error conditions
LOG_WARNING = 2     # Warning: warning conditions
LOG_INFO = 3        # Informational: normal operational messages
LOG_DEBUG = 4       # Debug: debug-level messages

ROOT_LOGGER = "promisecalc"
LOG_FORMAT = "[%(relativeCreated)010d] %(levelname)-8s - %(name)s - %(message)s"

_STDLIB_LEVELS = {
    LOG_CRITICAL: logging.CRITICAL,
    LOG_ERROR: logging.ERROR,
    LOG_WARNING: logging.WARNING,
    LOG_INFO: logging.INFO,
    LOG_DEBUG: logging.DEBUG,
}


class LogManager:
    _instance = None
    _level = LOG_WARNING

    def __init__(self):
        self.root = logging.getLogger(ROOT_LOGGER)
        if not self.root.handlers:
            handler = logging.StreamHandler()
            handler.setFormatter(logging.Formatter(LOG_FORMAT))
            self.root.addHandler(handler)
        self.root.propagate = False
        self.root.setLevel(_STDLIB_LEVELS[self._level])

    @staticmethod
    def get_instance():
        if not LogManager._instance:
            LogManager._instance = LogManager()
        return LogManager._instance

    @property
    def level(self):
        return self._level

    @level.setter
    def level(self, value):
        if 0 <= value <= 4:
            self._level = value
            self.root.setLevel(_STDLIB_LEVELS[value])


class Logger:
    def __init__(self, name):
        self.name = name
        self.manager = LogManager.get_instance()
        self._logger = logging.getLogger(f"{ROOT_LOGGER}.{name}")

    def debug(self, msg, *args): self._logger.debug(msg, *args)
    def info(self, msg, *args): self._logger.info(msg, *args)
    def warning(self, msg, *args): self._logger.warning(msg, *args)
    def error(self, msg, *args): self._logger.error(msg, *args)
    def critical(self, msg, *args): self._logger.critical(msg, *args)

    def exc(self, e, msg=None):
        self._logger.error(msg or str(e), exc_info=(type(e), e, e.__traceback__))
