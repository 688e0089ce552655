"""Promise and decision calculus: promise issuing over scopes, internalized
decisions, assessment and trust, with meadow arithmetic and budget tuplices."""
from .engine import Simulator
from .scenario import parse_scenario

__all__ = ["Simulator", "parse_scenario"]
