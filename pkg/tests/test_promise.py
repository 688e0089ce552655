"""
unit tests for promisecalc.promise
"""
from dataclasses import replace
from fractions import Fraction
from random import Random

from pytest import mark, raises

from promisecalc.errors import OfferRejected, ValidationError
from promisecalc.promise import (
    AgentId, ImplicationRule, IntentionClass, OpaqueText, OutcomeInstance, PromiseBody, PromiseDraft, PromiseKind,
    Quantity, TransferClaim, accept_offer, agent_id, classify_intention, decay_factor, derive_implied_promises,
    erode_instances, issue_promise, make_offer, silent,
)

A, B, C = AgentId("A"), AgentId("B"), AgentId("C")


def _draft(scope=(B,), text="deliver the goods", **kw):
    return PromiseDraft(A, B, frozenset(scope), PromiseBody(OpaqueText(text)), **kw)


def test_promise_01():
    """test issue_promise() - one instance per scope member"""
    record, instances = issue_promise(_draft(scope=(C, B), promise_id="P1"), 3)
    assert record.promise_id == "P1"
    assert record.issue_time == 3
    assert [i.holder for i in instances] == ["B", "C"]
    assert all(i.promise_id == "P1" and i.confidence == 1 for i in instances)
    assert A not in {i.holder for i in instances}


def test_promise_02():
    """test issue_promise() - derived ids are stable"""
    first, _ = issue_promise(_draft(), 1)
    second, _ = issue_promise(_draft(), 1)
    third, _ = issue_promise(_draft(), 2)
    assert first.promise_id.startswith("P-")
    assert first.promise_id == second.promise_id
    assert first.promise_id != third.promise_id


def test_promise_03():
    """test PromiseDraft() - validation"""
    with raises(ValidationError, match="not in the scope"):
        _draft(scope=(C,))
    with raises(ValidationError, match="name a parent"):
        _draft(kind=PromiseKind.IMPLIED)
    with raises(ValidationError, match="name a parent"):
        _draft(parent="P1")
    with raises(ValidationError, match="unsupported promise payload"):
        PromiseBody("plain text")
    with raises(ValidationError, match="unique"):
        PromiseBody(OpaqueText("x"), (Quantity("n", Fraction(1)), Quantity("n", Fraction(2))))
    with raises(ValidationError, match="invalid agent id"):
        agent_id("1A")


@mark.parametrize(
    "underlying, public, committed, expected",
    [
        (None, False, True, IntentionClass.REAL),
        (None, False, False, IntentionClass.INCIDENTAL),
        ("", False, True, IntentionClass.INDIFFERENT),
        ("keep the money", False, True, IntentionClass.DECEPTIVE),
        ("keep the money", True, True, IntentionClass.INVALID),
    ],
)
def test_promise_04(underlying, public, committed, expected):
    """test issue_promise() - intention classification"""
    draft = _draft(underlying_intention=underlying, discrepancy_public=public, committed=committed)
    record, _ = issue_promise(draft, 1)
    assert record.classification is expected


def test_promise_05():
    """test classify_intention() - matching texts"""
    assert classify_intention("pay", "pay", False) is IntentionClass.REAL
    assert classify_intention("pay", None, True) is IntentionClass.INDIFFERENT


def test_promise_06():
    """test PromiseBody.describe() - payload, quantities and deadline"""
    body = PromiseBody(TransferClaim(Fraction(5), "a", "b"), (Quantity("fee", Fraction(1, 2), "EUR"),), Fraction(20))
    assert body.describe() == "transfer 5 from a to b with fee = 1/2 EUR by 20"
    exclusive = PromiseBody(TransferClaim(Fraction(0), "a", "b", exclusive=True))
    assert exclusive.describe() == "no transfer from a to any account other than b"


def test_promise_07():
    """test derive_implied_promises() - one promise per match with dotted ids"""
    parent, _ = issue_promise(_draft(text="order soup and order bread", promise_id="P1"), 4)
    rule = ImplicationRule("pay", "order", C, frozenset({C}), PromiseBody(OpaqueText("pay the bill")))
    derived = derive_implied_promises(parent, [rule])
    assert [d.promise_id for d in derived] == ["P1.pay.1", "P1.pay.2"]
    assert all(d.kind is PromiseKind.IMPLIED and d.parent == "P1" for d in derived)
    assert all(d.promiser == "A" and d.issue_time == 4 for d in derived)
    assert derive_implied_promises(parent, []) == []


def test_promise_08():
    """test ImplicationRule() - validation"""
    body = PromiseBody(OpaqueText("x"))
    with raises(ValidationError, match="not in the scope"):
        ImplicationRule("r", "x", C, frozenset({B}), body)
    with raises(ValidationError, match="bad pattern"):
        ImplicationRule("r", "(", C, frozenset({C}), body)


def test_promise_09():
    """test silent() - kind change"""
    assert silent(_draft()).kind is PromiseKind.SILENT


@mark.parametrize(
    "dt, half_life, expected",
    [
        (0, 100, Fraction(1)),
        (100, 100, Fraction(1, 2)),
        (200, 100, Fraction(1, 4)),
        (50, 100, Fraction(46340, 65536)),
        (10000, 1, Fraction(0)),
    ],
)
def test_promise_10(dt, half_life, expected):
    """test decay_factor() - fixed point halving"""
    assert decay_factor(dt, half_life) == expected


def test_promise_11():
    """test erode_instances() - dropping below the threshold"""
    fast = OutcomeInstance("P1", B, Fraction(0), half_life=Fraction(1))
    slow = OutcomeInstance("P1", C, Fraction(0), half_life=Fraction(100))
    kept = erode_instances([fast, slow], 2, Fraction(1, 2))
    assert [i.holder for i in kept] == ["C"]
    assert Fraction(1, 2) < kept[0].confidence < 1
    with raises(ValidationError):
        decay_factor(-1, 1)
    with raises(ValidationError):
        OutcomeInstance("P1", B, Fraction(0), half_life=Fraction(0))


def test_promise_12():
    """test accept_offer() - offered promise and usage promise"""
    offer = make_offer(_draft(), "B pays first", "O2")
    offered, used = accept_offer(offer, B, 3)
    assert offered.promise_id == "O2"
    assert used.promise_id == "O2.use"
    assert (used.promiser, used.promisee) == ("B", "A")
    assert used.scope == {"A"}


def test_promise_13():
    """test accept_offer() - rejection"""
    offer = make_offer(_draft(), "B pays first", "O2")
    with raises(OfferRejected, match="not the promisee"):
        accept_offer(offer, C, 3)
    with raises(OfferRejected, match="already accepted"):
        accept_offer(replace(offer, accepted=True), B, 3)
    with raises(ValidationError, match="condition"):
        make_offer(_draft(), "", "O3")


@mark.parametrize("confidence", [Fraction(3, 2), Fraction(-1), Fraction(-1, 100)])
def test_promise_14(confidence):
    """test OutcomeInstance() - confidence outside [0, 1]"""
    with raises(ValidationError, match="confidence"):
        OutcomeInstance("P1", B, Fraction(0), confidence=confidence)


def test_promise_15():
    """test erode_instances() - confidence never grows with elapsed time"""
    rng = Random(7)
    for _ in range(50):
        instance = OutcomeInstance(
            "P1", B, Fraction(0),
            confidence=Fraction(rng.randint(0, 20), 20),
            half_life=Fraction(rng.randint(1, 40), rng.randint(1, 4)),
        )
        steps = sorted(Fraction(rng.randint(0, 200), rng.randint(1, 5)) for _ in range(6))
        eroded = [erode_instances([instance], dt, Fraction(0))[0].confidence for dt in steps]
        assert all(0 <= c <= 1 for c in eroded)
        assert all(a >= b for a, b in zip(eroded, eroded[1:]))
