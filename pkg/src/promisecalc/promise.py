"""Promises, their scope distribution and the erosion of what agents retain."""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import NewType, Optional, Union

from .errors import OfferRejected, ValidationError
from .meadow import render_rational
from .tuplix import Tuplix

AgentId = NewType("AgentId", str)

DEFAULT_HALF_LIFE = Fraction(100)
DECAY_BITS = 16
_AGENT = re.compile(r"^[A-Za-z_][\w.]*$")


def agent_id(name: str) -> AgentId:
    if not name or not _AGENT.match(name):
        raise ValidationError(f"invalid agent id {name!r}")
    return AgentId(name)


@dataclass(frozen=True)
class OpaqueText:
    text: str

    def describe(self) -> str:
        return self.text


@dataclass(frozen=True)
class MeadowProposition:
    expr: object
    text: str

    def describe(self) -> str:
        return self.text


@dataclass(frozen=True)
class TransferClaim:
    """A transfer of `amount` from `source` to `target`.

    With ``exclusive`` the claim is that no transfer leaves `source` for any
    other account; the amount is then irrelevant. `confirmations` None leaves
    the required count to the observer.
    """
    amount: Fraction
    source: str
    target: str
    exclusive: bool = False
    confirmations: Optional[int] = None

    def describe(self) -> str:
        if self.exclusive:
            return f"no transfer from {self.source} to any account other than {self.target}"
        return f"transfer {render_rational(self.amount)} from {self.source} to {self.target}"


@dataclass(frozen=True)
class BudgetClaim:
    name: str
    budget: Tuplix
    shortfall: Fraction = Fraction(0)

    def describe(self) -> str:
        text = f"carry out within budget {self.name}"
        if self.shortfall:
            text += f" short by at most {render_rational(self.shortfall)}"
        return text


Payload = Union[OpaqueText, MeadowProposition, TransferClaim, BudgetClaim]
PAYLOADS = (OpaqueText, MeadowProposition, TransferClaim, BudgetClaim)


@dataclass(frozen=True)
class Quantity:
    name: str
    value: Fraction
    unit: str = ""


@dataclass(frozen=True)
class PromiseBody:
    quality: Payload
    quantity: tuple = ()
    deadline: Optional[Fraction] = None

    def __post_init__(self):
        if not isinstance(self.quality, PAYLOADS):
            raise ValidationError(f"unsupported promise payload {type(self.quality).__name__}")
        names = [q.name for q in self.quantity]
        if len(names) != len(set(names)):
            raise ValidationError("quantity names must be unique")

    def describe(self) -> str:
        text = self.quality.describe()
        if self.quantity:
            text += " with " + ", ".join(
                f"{q.name} = {render_rational(q.value)}{' ' + q.unit if q.unit else ''}" for q in self.quantity)
        if self.deadline is not None:
            text += f" by {render_rational(self.deadline)}"
        return text


class IntentionClass(Enum):
    REAL = "real"
    INCIDENTAL = "incidental"
    INDIFFERENT = "indifferent"
    DECEPTIVE = "deceptive"
    INVALID = "invalid"


class PromiseKind(Enum):
    EXPLICIT = "explicit"
    SILENT = "silent"
    IMPLIED = "implied"


def classify_intention(apparent: str, underlying: Optional[str],
                       publicly_observable_discrepancy: bool, committed: bool = True) -> IntentionClass:
    if not underlying:
        return IntentionClass.INDIFFERENT
    if underlying == apparent:
        return IntentionClass.REAL if committed else IntentionClass.INCIDENTAL
    if publicly_observable_discrepancy:
        return IntentionClass.INVALID
    return IntentionClass.DECEPTIVE


@dataclass(frozen=True)
class PromiseDraft:
    """A promise before it is issued.

    `underlying_intention` None means the promiser intends what it says; an
    empty string means it intends nothing in particular.
    """
    promiser: AgentId
    promisee: AgentId
    scope: frozenset
    body: PromiseBody
    underlying_intention: Optional[str] = None
    committed: bool = True
    discrepancy_public: bool = False
    kind: PromiseKind = PromiseKind.EXPLICIT
    parent: Optional[str] = None
    promise_id: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "scope", frozenset(self.scope))
        if self.promisee not in self.scope:
            raise ValidationError(f"promisee {self.promisee} is not in the scope")
        if (self.kind is PromiseKind.IMPLIED) != (self.parent is not None):
            raise ValidationError("implied promises, and only those, name a parent")

    @property
    def apparent_intention(self) -> str:
        return self.body.describe()

    @property
    def underlying(self) -> str:
        if self.underlying_intention is None:
            return self.apparent_intention
        return self.underlying_intention


@dataclass(frozen=True)
class PromiseRecord:
    promise_id: str
    draft: PromiseDraft
    issue_time: Fraction
    classification: IntentionClass

    @property
    def promiser(self): return self.draft.promiser
    @property
    def promisee(self): return self.draft.promisee
    @property
    def scope(self): return self.draft.scope
    @property
    def body(self): return self.draft.body
    @property
    def kind(self): return self.draft.kind
    @property
    def parent(self): return self.draft.parent


@dataclass(frozen=True)
class OutcomeInstance:
    promise_id: str
    holder: AgentId
    received_time: Fraction
    confidence: Fraction = Fraction(1)
    half_life: Fraction = DEFAULT_HALF_LIFE

    def __post_init__(self):
        if self.half_life <= 0:
            raise ValidationError("half-life must be positive")
        if not 0 <= self.confidence <= 1:
            raise ValidationError(f"confidence {self.confidence} must lie in [0, 1]")


def derived_promise_id(draft: PromiseDraft, time) -> str:
    digest = hashlib.sha256(
        "|".join((draft.promiser, draft.promisee, ",".join(sorted(draft.scope)),
                  draft.body.describe(), str(time))).encode()
    ).hexdigest()
    return "P-" + digest[:10]


def distribute(record: PromiseRecord, half_life=DEFAULT_HALF_LIFE) -> list:
    """One outcome instance per scope member, in holder order"""
    return [
        OutcomeInstance(record.promise_id, holder, record.issue_time, Fraction(1), Fraction(half_life))
        for holder in sorted(record.scope)
    ]


def issue_promise(draft: PromiseDraft, time, half_life=DEFAULT_HALF_LIFE):
    time = Fraction(time)
    record = PromiseRecord(
        promise_id=draft.promise_id or derived_promise_id(draft, time),
        draft=draft,
        issue_time=time,
        classification=classify_intention(
            draft.apparent_intention, draft.underlying, draft.discrepancy_public, draft.committed),
    )
    return record, distribute(record, half_life)


def silent(draft: PromiseDraft) -> PromiseDraft:
    return replace(draft, kind=PromiseKind.SILENT, parent=None)


@dataclass(frozen=True)
class ImplicationRule:
    """Issuing a promise whose body text matches `pattern` implies another
    promise from the same promiser, once per match."""
    name: str
    pattern: str
    promisee: AgentId
    scope: frozenset
    body: PromiseBody

    def __post_init__(self):
        object.__setattr__(self, "scope", frozenset(self.scope))
        if self.promisee not in self.scope:
            raise ValidationError(f"rule {self.name}: promisee {self.promisee} is not in the scope")
        try:
            re.compile(self.pattern)
        except re.error as e:
            raise ValidationError(f"rule {self.name}: bad pattern: {e}") from None


def derive_implied_promises(promise: PromiseRecord, rules) -> list:
    derived = []
    text = promise.body.describe()
    for rule in rules:
        for k, _ in enumerate(re.finditer(rule.pattern, text), start=1):
            draft = PromiseDraft(
                promiser=promise.promiser,
                promisee=rule.promisee,
                scope=rule.scope,
                body=rule.body,
                kind=PromiseKind.IMPLIED,
                parent=promise.promise_id,
                promise_id=f"{promise.promise_id}.{rule.name}.{k}",
            )
            record, _ = issue_promise(draft, promise.issue_time)
            derived.append(record)
    return derived


def decay_factor(dt, half_life) -> Fraction:
    """floor(2**16 * 2**(-dt/half_life)) / 2**16, exactly.

    For dt/half_life = p/q this is the largest k with k**q * 2**p <= 2**(16q).
    """
    ratio = Fraction(dt) / Fraction(half_life)
    if ratio < 0:
        raise ValidationError("erosion needs non-negative elapsed time")
    p, q = ratio.numerator, ratio.denominator
    scale = 1 << DECAY_BITS
    if p == 0:
        return Fraction(1)
    if p > (DECAY_BITS + 1) * q:
        return Fraction(0)
    limit = 1 << (DECAY_BITS * q)
    lo, hi = 0, scale
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if (mid ** q) << p <= limit:
            lo = mid
        else:
            hi = mid - 1
    return Fraction(lo, scale)


def erode_instances(instances, dt, drop_threshold) -> list:
    """Decay every instance over `dt`; those below the threshold are dropped"""
    kept = []
    for instance in instances:
        confidence = instance.confidence * decay_factor(dt, instance.half_life)
        if confidence >= drop_threshold:
            kept.append(replace(instance, confidence=confidence))
    return kept


@dataclass(frozen=True)
class ConditionalPromise:
    offer_id: str
    draft: PromiseDraft
    condition: str
    accepted: bool = False


def make_offer(draft: PromiseDraft, condition: str, offer_id: str) -> ConditionalPromise:
    if not condition:
        raise ValidationError("an offer needs a condition")
    return ConditionalPromise(offer_id, replace(draft, promise_id=offer_id), condition)


def accept_offer(offer: ConditionalPromise, acceptor: AgentId, time):
    """Issue the offered promise and the acceptor's promise to make use of it"""
    if offer.accepted:
        raise OfferRejected(f"offer {offer.offer_id} was already accepted")
    if acceptor != offer.draft.promisee:
        raise OfferRejected(f"{acceptor} is not the promisee of offer {offer.offer_id}")
    offered, _ = issue_promise(offer.draft, time)
    usage = PromiseDraft(
        promiser=acceptor,
        promisee=offer.draft.promiser,
        scope=frozenset({offer.draft.promiser}),
        body=PromiseBody(OpaqueText(f"make use of promise {offer.offer_id}")),
        promise_id=f"{offer.offer_id}.use",
    )
    used, _ = issue_promise(usage, time)
    return offered, used
