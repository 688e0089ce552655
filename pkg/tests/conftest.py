"""shared fixtures for promisecalc tests"""
from pathlib import Path

from pytest import fixture

from promisecalc.config import Config
from promisecalc.engine import Simulator
from promisecalc.scenario import parse_scenario

CORPUS = Path(__file__).resolve().parent.parent / "src" / "promisecalc" / "corpus"


@fixture
def corpus():
    return CORPUS


@fixture
def scenarios():
    return sorted(p.stem for p in CORPUS.glob("*.scn"))


@fixture
def fresh_config(tmp_path):
    """Config factory that ignores the working directory and the environment"""
    return lambda: Config(tmp_path / "absent.json", environ={})


@fixture
def simulate(fresh_config):
    """Run a corpus scenario by name, or inline scenario text"""

    def _simulate(name=None, text=None, **overrides):
        if text is None:
            text = (CORPUS / f"{name}.scn").read_text()
        simulator = Simulator(parse_scenario(text, name or "inline"), fresh_config(), overrides)
        simulator.run()
        return simulator

    return _simulate
