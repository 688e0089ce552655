"""
unit tests for promisecalc.trace
"""
import json
from fractions import Fraction

from pytest import raises

from promisecalc.errors import ValidationError
from promisecalc.trace import RecordPattern, Trace, plain


def test_trace_01():
    """test Trace.append() - partitions number records independently"""
    trace = Trace()
    trace.append(0, "run", {})
    trace.append(1, "idocc", {"id": "I1"}, private=True)
    trace.append(1, "event", {"event": "tick"})
    assert [r.seq for r in trace.public] == [0, 1]
    assert [r.seq for r in trace.private] == [0]
    assert len(trace) == 3
    assert [r.kind for r in trace.records()] == ["run", "event", "idocc"]
    assert [r.kind for r in trace.records(include_private=False)] == ["run", "event"]


def test_trace_02():
    """test Trace.append() - time regression"""
    trace = Trace()
    trace.append(2, "tick", {})
    with raises(ValidationError, match="time regression"):
        trace.append(1, "tick", {})
    trace.append(1, "idocc", {}, private=True)


def test_trace_03():
    """test Trace.export() - stable line format"""
    trace = Trace()
    trace.append(Fraction(1, 2), "event", {"z": 1, "a": Fraction(3, 4)})
    trace.append(1, "intention", {"underlying": "secret"}, private=True)
    full = trace.export().splitlines()
    assert full[0] == '{"kind":"event","payload":{"a":"3/4","z":1},"seq":0,"time":"1/2"}'
    assert json.loads(full[1])["private"] is True
    public = trace.export(public_only=True)
    assert "secret" not in public
    assert public.count("\n") == 1


def test_trace_04():
    """test plain() - payload conversion"""
    assert plain({"s": frozenset({"b", "a"}), "q": Fraction(6, 4), "t": (1, None, True)}) == {
        "s": ["a", "b"], "q": "3/2", "t": [1, None, True],
    }


def test_trace_05():
    """test RecordPattern.matches() - kind, event alias and field text"""
    trace = Trace()
    promise = trace.append(1, "promise", {"id": "P12", "promiser": "B"})
    event = trace.append(1, "event", {"event": "transfer", "amount": "5", "from": "a"})
    assert RecordPattern("promise", (("id", "P12"),)).matches(promise)
    assert not RecordPattern("promise", (("id", "P9"),)).matches(promise)
    assert RecordPattern("transfer", (("amount", "5"),)).matches(event)
    assert RecordPattern("event").matches(event)
    assert not RecordPattern("transfer", (("to", "b"),)).matches(event)
    assert RecordPattern("transfer", (("from", "a"),)).describe() == "(transfer from=a)"


def test_trace_06():
    """test Trace.public_until() and of_kind()"""
    trace = Trace()
    trace.append(1, "tick", {})
    trace.append(2, "tick", {})
    trace.append(3, "event", {"event": "x"})
    assert len(list(trace.public_until(2))) == 2
    assert len(trace.of_kind("tick")) == 2
