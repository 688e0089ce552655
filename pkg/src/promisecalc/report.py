"""Run summary computed from a finished trace."""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import PromiseCalcError
from .expr import parse_proposition
from .meadow import detect_mvl_creep, render_rational
from .trace import Trace

DEFAULT_BOUND = 32


@dataclass
class Erosion:
    created: int = 0
    dropped: int = 0
    retained: int = 0
    min_confidence: Optional[Fraction] = None
    mean_confidence: Optional[Fraction] = None


@dataclass
class Summary:
    promises: list = field(default_factory=list)      # (id, promiser, promisee, kind, body)
    verdicts: list = field(default_factory=list)      # (observer, promise, status, degree)
    trust: dict = field(default_factory=dict)         # (observer, promiser) -> last value
    obligations: list = field(default_factory=list)   # (obligor, content, source)
    erosion: Erosion = field(default_factory=Erosion)
    creep: dict = field(default_factory=dict)         # promise -> creep status
    budget: list = field(default_factory=list)        # (observer, promise, status)
    errors: int = 0

    @property
    def empty(self) -> bool:
        return not (self.promises or self.verdicts or self.trust or self.obligations or self.errors
                    or self.erosion.created)

    def render(self) -> list:
        if self.empty:
            return ["empty trace"]
        lines = [f"promises: {len(self.promises)}"]
        for pid, promiser, promisee, kind, body in self.promises:
            lines.append(f"  {pid}: {promiser} -> {promisee} ({kind}) {body}")
        lines.append("verdicts:")
        for observer, pid, status, degree in self.verdicts:
            lines.append(f"  {observer} on {pid}: {status}" + (f" degree {degree}" if degree is not None else ""))
        lines.append("trust:")
        for (observer, promiser), value in self.trust.items():
            lines.append(f"  {observer} in {promiser}: {value}")
        lines.append(f"obligations: {len(self.obligations)}")
        for obligor, content, source in self.obligations:
            lines.append(f"  {obligor}: {content} [{source}]")
        e = self.erosion
        lines.append(f"instances: created {e.created}, dropped {e.dropped}, retained {e.retained}")
        if e.retained:
            lines.append(f"  confidence min {render_rational(e.min_confidence)}, "
                         f"mean {render_rational(e.mean_confidence)}")
        if self.creep:
            lines.append("mvl creep:")
            lines.extend(f"  {pid}: {status}" for pid, status in self.creep.items())
        if self.budget:
            lines.append("budget conformance:")
            lines.extend(f"  {observer} on {pid}: {status}" for observer, pid, status in self.budget)
        lines.append(f"errors: {self.errors}")
        return lines


def _creep_status(text, bound):
    try:
        return detect_mvl_creep(parse_proposition(text), bound).status
    except PromiseCalcError as e:
        return f"not checked ({e})"


def report(trace: Trace, bound: int = DEFAULT_BOUND, include_private: bool = False) -> Summary:
    summary = Summary()
    budget_promises = set()
    confidences = []
    for record in trace.records(include_private):
        payload = record.payload
        kind = record.kind
        if kind == "promise":
            pid = payload["id"]
            summary.promises.append((pid, payload["promiser"], payload["promisee"], payload["kind"], payload["body"]))
            if "meadow" in payload:
                summary.creep[pid] = _creep_status(payload["meadow"], bound)
            if "budget" in payload:
                budget_promises.add(pid)
        elif kind == "verdict":
            summary.verdicts.append((payload["observer"], payload["promise"], payload["status"],
                                     payload.get("degree")))
            if payload["promise"] in budget_promises:
                summary.budget.append((payload["observer"], payload["promise"], payload["status"]))
        elif kind == "trust":
            summary.trust[(payload["observer"], payload["promiser"])] = payload["value"]
        elif kind == "obligation":
            summary.obligations.append((payload["obligor"], payload["content"], payload["source"]))
        elif kind == "instance":
            summary.erosion.created += 1
        elif kind == "drop":
            summary.erosion.dropped += 1
        elif kind == "retain":
            confidences.append(Fraction(payload["confidence"]))
        elif kind == "error":
            summary.errors += 1
    if confidences:
        summary.erosion.retained = len(confidences)
        summary.erosion.min_confidence = min(confidences)
        summary.erosion.mean_confidence = sum(confidences) / len(confidences)
    return summary
