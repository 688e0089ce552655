import json
import os
from pathlib import Path

from .errors import ConfigError
from .log import LOG_WARNING, Logger
from .meadow import parse_rational

DEFAULT_CONFIG = {
    "alpha": "1/10",
    "beta": "1/2",
    "initial_trust": "1/2",
    "half_life": "100",
    "drop_threshold": "1/100",
    "tick": "1",
    "confirmations": 1,
    "meadow_bound": 32,
    "instance_bound": 64,
    "seed": 0,
    "loglevel": LOG_WARNING,
}

CONFIG_FILE = "promisecalc.json"
ENV_PREFIX = "PROMISECALC_"

RATIONAL_KEYS = ("alpha", "beta", "initial_trust", "half_life", "drop_threshold", "tick")
INTEGER_KEYS = ("confirmations", "meadow_bound", "instance_bound", "seed", "loglevel")


class Config:
    def __init__(self, path=None, environ=None):
        self.log = Logger("Config")
        self.data = DEFAULT_CONFIG.copy()
        self.load(path)
        self.apply_environment(os.environ if environ is None else environ)

    def load(self, path=None):
        path = Path(path or CONFIG_FILE)
        try:
            if path.exists():
                with open(path) as f:
                    stored = json.load(f)
                self.update(stored)
                self.log.info("Loaded configuration from %s: %s", path, self.data)
        except (OSError, ValueError, ConfigError) as e:
            self.log.exc(e, "Error loading config")

    def apply_environment(self, environ):
        overrides = {}
        for key in DEFAULT_CONFIG:
            value = environ.get(ENV_PREFIX + key.upper())
            if value is not None:
                overrides[key] = value
        if overrides:
            self.update(overrides)
            self.log.debug("Environment overrides: %s", overrides)

    def update(self, overrides):
        """Validate and merge a mapping of settings"""
        for key, value in overrides.items():
            if key not in DEFAULT_CONFIG:
                raise ConfigError(f"unknown setting {key!r}")
            self.data[key] = check_setting(key, value)

    def _rational(self, key):
        return parse_rational(self.data[key])

    @property
    def alpha(self): return self._rational("alpha")
    @alpha.setter
    def alpha(self, value): self.update({"alpha": value})

    @property
    def beta(self): return self._rational("beta")
    @beta.setter
    def beta(self, value): self.update({"beta": value})

    @property
    def initial_trust(self): return self._rational("initial_trust")
    @property
    def half_life(self): return self._rational("half_life")
    @property
    def drop_threshold(self): return self._rational("drop_threshold")
    @property
    def tick(self): return self._rational("tick")
    @property
    def confirmations(self): return self.data["confirmations"]
    @property
    def meadow_bound(self): return self.data["meadow_bound"]
    @property
    def instance_bound(self): return self.data["instance_bound"]

    @property
    def seed(self): return self.data["seed"]
    @seed.setter
    def seed(self, value): self.update({"seed": value})

    @property
    def loglevel(self): return self.data["loglevel"]
    @loglevel.setter
    def loglevel(self, value): self.update({"loglevel": value})


def check_setting(key, value):
    if key in INTEGER_KEYS:
        try:
            number = int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be an integer, got {value!r}") from None
        if key != "seed" and number < 0:
            raise ConfigError(f"{key} must not be negative")
        return number
    try:
        number = parse_rational(str(value))
    except ValueError:
        raise ConfigError(f"{key} must be a rational p/q, got {value!r}") from None
    if key in ("half_life", "tick"):
        if number <= 0:
            raise ConfigError(f"{key} must be positive")
    elif not 0 <= number <= 1:
        raise ConfigError(f"{key} must lie in [0, 1]")
    return str(number)
