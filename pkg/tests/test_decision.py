"""
unit tests for promisecalc.decision
"""
from dataclasses import replace
from fractions import Fraction

from pytest import raises

from promisecalc.decision import (
    IdoccState, InternalizedPromissoryDecisionSource, Obligation, PromissoryDecisionSource,
    combine_promise_with_promissory_decision, deactivate_idocc, effectuate, take_decision, take_internal_decision,
    take_promissory_decision, trigger_idocc,
)
from promisecalc.errors import PermissionDenied, StateError, ValidationError
from promisecalc.promise import AgentId, OpaqueText, PromiseBody, PromiseDraft, TransferClaim
from promisecalc.trace import RecordPattern, Trace

A, B = AgentId("A"), AgentId("B")
PAY = PromiseBody(TransferClaim(Fraction(5), "a", "b"))


def test_decision_01():
    """test take_decision() - outcome and notification"""
    outcome = take_decision(A, "buyer", PAY, {B, A}, 2, decision_id="D1")
    assert outcome.decision_id == "D1"
    assert outcome.tangible
    assert outcome.notified() == ["A", "B"]
    derived = take_decision(A, "buyer", PAY, {B}, 2)
    assert derived.decision_id.startswith("D-")


def test_decision_02():
    """test take_promissory_decision() - obligation provenance"""
    outcome, obligation = take_promissory_decision(A, "payer", PAY, {B}, 1, decision_id="D2")
    assert obligation.obligor == "A"
    assert obligation.source == PromissoryDecisionSource("D2")
    assert not obligation.internal
    idocc, obligation = take_promissory_decision(A, "payer", PAY, (), 1, internal=True, decision_id="D3")
    assert idocc.state is IdoccState.LOADED
    assert obligation.source == InternalizedPromissoryDecisionSource("D3")
    assert obligation.internal
    assert obligation.source.describe() == "internalized-promissory-decision D3"


def test_decision_03():
    """test take_promissory_decision() - cannot commit another agent"""
    with raises(ValidationError, match="cannot commit B"):
        take_promissory_decision(A, "payer", PAY, {B}, 1, actor=B)


def test_decision_04():
    """test Obligation() - only promissory sources"""
    with raises(ValidationError, match="promissory decisions only"):
        Obligation(A, PAY, "D1")


def test_decision_05():
    """test trigger_idocc() - fires once on a matching record"""
    trace = Trace()
    idocc = take_internal_decision(A, PAY, RecordPattern("promise", (("id", "P12"),)), 1, "I1")
    other = trace.append(2, "promise", {"id": "P9"})
    idocc, actions = trigger_idocc(idocc, other)
    assert idocc.state is IdoccState.LOADED
    assert actions == []
    match = trace.append(3, "promise", {"id": "P12"})
    idocc, actions = trigger_idocc(idocc, match)
    assert idocc.state is IdoccState.EFFECTUATED
    assert [a.kind for a in actions] == ["transfer"]
    assert dict(actions[0].fields) == {"amount": "5", "from": "a", "to": "b"}
    assert trigger_idocc(idocc, match) == (idocc, [])


def test_decision_06():
    """test trigger_idocc() - memorized intentions never fire"""
    trace = Trace()
    idocc = take_internal_decision(A, PAY, None, 1)
    record = trace.append(1, "promise", {"id": "P12"})
    assert trigger_idocc(idocc, record) == (idocc, [])


def test_decision_07():
    """test deactivate_idocc() - owner only, before effectuation"""
    idocc = take_internal_decision(A, PAY, None, 1, "I1")
    with raises(PermissionDenied):
        deactivate_idocc(idocc, take_decision(B, "payee", PAY, {B}, 2))
    deactivated = deactivate_idocc(idocc, take_decision(A, "payer", PAY, {A}, 2))
    assert deactivated.state is IdoccState.DEACTIVATED
    assert idocc.state is IdoccState.LOADED
    by_idocc = deactivate_idocc(idocc, take_internal_decision(A, PAY, None, 3))
    assert by_idocc.state is IdoccState.DEACTIVATED
    effectuated = replace(idocc, state=IdoccState.EFFECTUATED)
    with raises(StateError):
        deactivate_idocc(effectuated, take_decision(A, "payer", PAY, {A}, 2))


def test_decision_08():
    """test effectuate() - opaque content"""
    (action,) = effectuate(PromiseBody(OpaqueText("ship the parcel")), A)
    assert action.kind == "effectuate"
    assert action.actor == "A"
    assert dict(action.fields) == {"content": "ship the parcel"}


def test_decision_09():
    """test combine_promise_with_promissory_decision() - promise, decision and obligation"""
    draft = PromiseDraft(A, B, frozenset({B}), PAY, promise_id="P3")
    record, instances, outcome, obligation = combine_promise_with_promissory_decision(draft, 4)
    assert record.promise_id == "P3"
    assert len(instances) == 1
    assert outcome.decision_id == "P3.decision"
    assert outcome.jurisdiction == {"B"}
    assert obligation.source == PromissoryDecisionSource("P3.decision")
