"""Decisions: tangible outcomes, internal outcomes (Idoccs) and the
obligations that only promissory decisions create."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .errors import PermissionDenied, StateError, ValidationError
from .meadow import render_rational
from .promise import AgentId, PromiseBody, PromiseDraft, TransferClaim, issue_promise, DEFAULT_HALF_LIFE
from .trace import Record, RecordPattern


@dataclass(frozen=True)
class DecisionOutcome:
    decision_id: str
    decider: AgentId
    role: str
    content: PromiseBody
    jurisdiction: frozenset
    time: Fraction
    tangible: bool = True

    def notified(self) -> list:
        return sorted(self.jurisdiction)


class IdoccState(Enum):
    LOADED = "loaded"
    EFFECTUATED = "effectuated"
    DEACTIVATED = "deactivated"


@dataclass(frozen=True)
class Idocc:
    """Internal decision outcome, held privately by its owner until a trigger
    effectuates it. An Idocc without trigger is a memorized intention."""
    idocc_id: str
    owner: AgentId
    content: PromiseBody
    trigger: Optional[RecordPattern]
    load_time: Fraction
    state: IdoccState = IdoccState.LOADED


@dataclass(frozen=True)
class PromissoryDecisionSource:
    decision_id: str

    def describe(self) -> str:
        return f"promissory-decision {self.decision_id}"


@dataclass(frozen=True)
class InternalizedPromissoryDecisionSource:
    idocc_id: str

    def describe(self) -> str:
        return f"internalized-promissory-decision {self.idocc_id}"


ObligationSource = Union[PromissoryDecisionSource, InternalizedPromissoryDecisionSource]


@dataclass(frozen=True)
class Obligation:
    obligor: AgentId
    content: PromiseBody
    source: ObligationSource

    def __post_init__(self):
        if not isinstance(self.source, (PromissoryDecisionSource, InternalizedPromissoryDecisionSource)):
            raise ValidationError("obligations arise from promissory decisions only")

    @property
    def internal(self) -> bool:
        return isinstance(self.source, InternalizedPromissoryDecisionSource)


@dataclass(frozen=True)
class Effectuation:
    """An action performed when an Idocc fires"""
    actor: AgentId
    kind: str
    fields: tuple


def _derived_id(prefix, *parts) -> str:
    return prefix + hashlib.sha256("|".join(map(str, parts)).encode()).hexdigest()[:10]


def take_decision(decider: AgentId, role: str, content: PromiseBody, jurisdiction, time,
                  decision_id: Optional[str] = None) -> DecisionOutcome:
    jurisdiction = frozenset(jurisdiction)
    time = Fraction(time)
    return DecisionOutcome(
        decision_id or _derived_id("D-", decider, role, content.describe(), time),
        decider, role, content, jurisdiction, time,
    )


def take_internal_decision(owner: AgentId, content: PromiseBody, trigger: Optional[RecordPattern], time,
                           idocc_id: Optional[str] = None) -> Idocc:
    time = Fraction(time)
    return Idocc(idocc_id or _derived_id("I-", owner, content.describe(), time), owner, content, trigger, time)


def effectuate(content: PromiseBody, actor: AgentId) -> list:
    """Actions that carry out `content`; nothing else is consulted"""
    quality = content.quality
    if isinstance(quality, TransferClaim) and not quality.exclusive:
        return [Effectuation(actor, "transfer", (
            ("amount", render_rational(quality.amount)),
            ("from", quality.source),
            ("to", quality.target),
        ))]
    return [Effectuation(actor, "effectuate", (("content", content.describe()),))]


def trigger_idocc(idocc: Idocc, event: Record):
    """Fire a loaded Idocc on a matching record; otherwise leave it as is"""
    if idocc.state is not IdoccState.LOADED or idocc.trigger is None:
        return idocc, []
    if not idocc.trigger.matches(event):
        return idocc, []
    return replace(idocc, state=IdoccState.EFFECTUATED), effectuate(idocc.content, idocc.owner)


def deactivate_idocc(idocc: Idocc, by_decision: Union[DecisionOutcome, Idocc]) -> Idocc:
    decider = by_decision.decider if isinstance(by_decision, DecisionOutcome) else by_decision.owner
    if decider != idocc.owner:
        raise PermissionDenied(f"{decider} cannot deactivate {idocc.owner}'s internal decision {idocc.idocc_id}")
    if idocc.state is IdoccState.EFFECTUATED:
        raise StateError(f"internal decision {idocc.idocc_id} was already effectuated")
    return replace(idocc, state=IdoccState.DEACTIVATED)


def take_promissory_decision(decider: AgentId, role: str, content: PromiseBody, jurisdiction, time,
                             internal: bool = False, actor: Optional[AgentId] = None,
                             trigger: Optional[RecordPattern] = None, decision_id: Optional[str] = None):
    """Decide to do something oneself; the only way an obligation arises.

    Returns the decision outcome (an Idocc when `internal`) and the obligation.
    """
    if (actor or decider) != decider:
        raise ValidationError(f"a promissory decision by {decider} cannot commit {actor}")
    if internal:
        idocc = take_internal_decision(decider, content, trigger, time, decision_id)
        return idocc, Obligation(decider, content, InternalizedPromissoryDecisionSource(idocc.idocc_id))
    outcome = take_decision(decider, role, content, jurisdiction, time, decision_id)
    return outcome, Obligation(decider, content, PromissoryDecisionSource(outcome.decision_id))


def combine_promise_with_promissory_decision(draft: PromiseDraft, time, decision_id: Optional[str] = None,
                                             half_life=DEFAULT_HALF_LIFE):
    """Issue a promise together with the promiser's decision to keep it"""
    record, instances = issue_promise(draft, time, half_life)
    outcome, obligation = take_promissory_decision(
        draft.promiser, "promiser", draft.body, draft.scope, time,
        decision_id=decision_id or f"{record.promise_id}.decision",
    )
    return record, instances, outcome, obligation
