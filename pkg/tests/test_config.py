"""
unit tests for promisecalc.config
"""
import json
from fractions import Fraction

from pytest import mark, raises

from promisecalc.config import DEFAULT_CONFIG, Config, check_setting
from promisecalc.errors import ConfigError


def test_config_01(fresh_config):
    """test Config() - defaults"""
    config = fresh_config()
    assert config.data == DEFAULT_CONFIG
    assert config.alpha == Fraction(1, 10)
    assert config.beta == Fraction(1, 2)
    assert config.half_life == 100
    assert config.drop_threshold == Fraction(1, 100)
    assert config.meadow_bound == 32
    assert config.confirmations == 1


def test_config_02(tmp_path):
    """test Config() - file, then environment"""
    path = tmp_path / "promisecalc.json"
    path.write_text(json.dumps({"alpha": "1/5", "seed": 3, "meadow_bound": 16}))
    config = Config(path, environ={"PROMISECALC_SEED": "9", "PROMISECALC_UNRELATED": "x"})
    assert config.alpha == Fraction(1, 5)
    assert config.meadow_bound == 16
    assert config.seed == 9


def test_config_03(tmp_path):
    """test Config() - unreadable files keep the defaults"""
    path = tmp_path / "promisecalc.json"
    path.write_text("{not json")
    assert Config(path, environ={}).data == DEFAULT_CONFIG
    path.write_text(json.dumps({"colour": "red"}))
    assert Config(path, environ={}).alpha == Fraction(1, 10)


def test_config_04(fresh_config):
    """test Config.update() - validation"""
    config = fresh_config()
    config.alpha = Fraction(1, 4)
    assert config.alpha == Fraction(1, 4)
    with raises(ConfigError, match="unknown setting"):
        config.update({"colour": "red"})
    with raises(ConfigError, match="lie in"):
        config.beta = "3/2"
    assert config.beta == Fraction(1, 2)


@mark.parametrize(
    "key, value, expected",
    [
        ("alpha", "2/4", "1/2"),
        ("half_life", 10, "10"),
        ("tick", "1/3", "1/3"),
        ("seed", "-4", -4),
        ("loglevel", "4", 4),
    ],
)
def test_config_05(key, value, expected):
    """test check_setting() - normalised values"""
    assert check_setting(key, value) == expected


@mark.parametrize(
    "key, value",
    [("half_life", "0"), ("tick", "-1"), ("alpha", "0.5"), ("meadow_bound", "many"), ("confirmations", -1)],
)
def test_config_06(key, value):
    """test check_setting() - rejected values"""
    with raises(ConfigError):
        check_setting(key, value)
