"""Run trace: an append-only log split into a public and a private partition.

Each partition numbers its records densely from 0, so private activity never
shifts public sequence numbers. Exports write one JSON object per line with a
stable key order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Iterator, Mapping

from .errors import ValidationError


def plain(value: Any) -> Any:
    """JSON-ready form of a payload value"""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (set, frozenset)):
        return sorted(plain(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, Mapping):
        return {str(k): plain(v) for k, v in value.items()}
    return str(value)


@dataclass(frozen=True)
class Record:
    time: Fraction
    seq: int
    kind: str
    payload: Mapping[str, Any]
    private: bool = False

    def get(self, key, default=None):
        return self.payload.get(key, default)

    def to_json(self, mark_private: bool = False) -> str:
        data = {"time": str(self.time), "seq": self.seq, "kind": self.kind, "payload": self.payload}
        if mark_private and self.private:
            data["private"] = True
        return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


@dataclass(frozen=True)
class RecordPattern:
    """``(kind key=value ...)``: matches records of that kind, or events whose
    ``event`` field names the kind, when every listed field has that text."""
    kind: str
    fields: tuple = ()

    def matches(self, record: Record) -> bool:
        if record.kind != self.kind and not (record.kind == "event" and record.get("event") == self.kind):
            return False
        return all(str(record.get(k)) == v for k, v in self.fields)

    def describe(self) -> str:
        return "(" + " ".join([self.kind] + [f"{k}={v}" for k, v in self.fields]) + ")"


class Trace:
    def __init__(self):
        self.public = []
        self.private = []

    def append(self, time, kind: str, payload: Mapping[str, Any], private: bool = False) -> Record:
        partition = self.private if private else self.public
        time = Fraction(time)
        if partition and time < partition[-1].time:
            raise ValidationError(f"trace time regression: {time} after {partition[-1].time}")
        record = Record(time, len(partition), kind, plain(payload), private)
        partition.append(record)
        return record

    def public_until(self, now) -> Iterator[Record]:
        for record in self.public:
            if record.time > now:
                break
            yield record

    def records(self, include_private: bool = True) -> list:
        if not include_private:
            return list(self.public)
        return sorted(self.public + self.private, key=lambda r: (r.time, r.private, r.seq))

    def of_kind(self, kind: str, include_private: bool = False) -> list:
        return [r for r in self.records(include_private) if r.kind == kind]

    def export(self, public_only: bool = False) -> str:
        lines = [r.to_json(mark_private=True) for r in self.records(not public_only)]
        return "".join(line + "\n" for line in lines)

    def __len__(self):
        return len(self.public) + len(self.private)
