"""The reasoning an agent runs for every outcome instance it holds:
expectations, assessment methods, verdicts, trust and planning."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .errors import BudgetError, EvaluationError, ValidationError
from .meadow import Semantics, TruthValue, eval_bool, free_vars, parse_rational, render_rational
from .promise import AgentId, BudgetClaim, MeadowProposition, OutcomeInstance, PromiseBody, TransferClaim
from .trace import Record, RecordPattern, Trace
from .tuplix import Account, Tuplix, conforms, is_instance_of

DEFAULT_ALPHA = Fraction(1, 10)
DEFAULT_BETA = Fraction(1, 2)
DEFAULT_TRUST = Fraction(1, 2)


class ProcessKind(Enum):
    EXPECTATION = "expectation-creation"
    METHOD = "method-generation"
    ASSESSMENT = "assessment"
    TRUST = "trust-maintenance"
    PLANNING = "planning"


@dataclass(frozen=True)
class ProcessRecord:
    holder: AgentId
    promise_id: str
    process: ProcessKind


def spawn_reasoning(instance: OutcomeInstance) -> list:
    """The five reasoning processes of an instance, in execution order"""
    return [ProcessRecord(instance.holder, instance.promise_id, kind) for kind in ProcessKind]


@dataclass(frozen=True)
class Expectation:
    holder: AgentId
    promise_id: str
    proposition: str
    valid_until: Optional[Fraction] = None


def derive_expectations(instance: OutcomeInstance, body: PromiseBody, confirmations: int = 1) -> list:
    quality = body.quality
    if isinstance(quality, TransferClaim) and not quality.exclusive:
        text = f"a {quality.describe()} is observed"
        times = quality.confirmations or confirmations
        if times > 1:
            text += f" {times} times"
    elif isinstance(quality, TransferClaim):
        text = f"{quality.describe()} is observed"
    elif isinstance(quality, BudgetClaim):
        text = f"the final account conforms to budget {quality.name}"
    else:
        text = quality.describe()
    if body.deadline is not None:
        text += f" by {render_rational(body.deadline)}"
    return [Expectation(instance.holder, instance.promise_id, text, body.deadline)]


class MethodKind(Enum):
    DEADLINE_EVENT = "deadline-event"
    MEADOW_CHECK = "meadow-check"
    BUDGET_CONFORMANCE = "budget-conformance"
    MANUAL_OBSERVATION = "manual-observation"


@dataclass(frozen=True)
class DeadlineEvent:
    amount: Fraction
    source: str
    target: str
    deadline: Optional[Fraction]
    confirmations: int = 1
    exclusive: bool = False


@dataclass(frozen=True)
class MeadowCheck:
    expr: object
    text: str
    semantics: Semantics = Semantics.MEADOW_TOTAL


@dataclass(frozen=True)
class BudgetConformance:
    name: str
    budget: Tuplix
    shortfall: Fraction


@dataclass(frozen=True)
class ManualObservation:
    pass


Check = Union[DeadlineEvent, MeadowCheck, BudgetConformance, ManualObservation]
_KINDS = {
    DeadlineEvent: MethodKind.DEADLINE_EVENT,
    MeadowCheck: MethodKind.MEADOW_CHECK,
    BudgetConformance: MethodKind.BUDGET_CONFORMANCE,
    ManualObservation: MethodKind.MANUAL_OBSERVATION,
}


@dataclass(frozen=True)
class AssessmentMethod:
    observer: AgentId
    promise_id: str
    check: Check

    @property
    def kind(self) -> MethodKind:
        return _KINDS[type(self.check)]

    def describe(self) -> str:
        check = self.check
        if isinstance(check, DeadlineEvent):
            return f"{'watch for conflicting' if check.exclusive else 'await'} transfers from {check.source}"
        if isinstance(check, MeadowCheck):
            return f"evaluate {check.text} ({check.semantics.value})"
        if isinstance(check, BudgetConformance):
            return f"compare the final account with {check.name}"
        return "await a manual verdict"


def generate_method(instance: OutcomeInstance, body: PromiseBody,
                    semantics: Semantics = Semantics.MEADOW_TOTAL, confirmations: int = 1) -> AssessmentMethod:
    quality = body.quality
    if isinstance(quality, TransferClaim):
        check = DeadlineEvent(quality.amount, quality.source, quality.target, body.deadline,
                              quality.confirmations or confirmations, quality.exclusive)
    elif isinstance(quality, MeadowProposition):
        check = MeadowCheck(quality.expr, quality.text, semantics)
    elif isinstance(quality, BudgetClaim):
        check = BudgetConformance(quality.name, quality.budget, quality.shortfall)
    else:
        check = ManualObservation()
    return AssessmentMethod(instance.holder, instance.promise_id, check)


class VerdictStatus(Enum):
    KEPT = "kept"
    BROKEN = "broken"
    PENDING = "pending"


@dataclass(frozen=True)
class Verdict:
    status: VerdictStatus
    degree: Optional[Fraction]
    strength: Fraction = Fraction(1)

    def __post_init__(self):
        expected = {VerdictStatus.KEPT: 1, VerdictStatus.BROKEN: 0, VerdictStatus.PENDING: None}[self.status]
        if self.degree != expected:
            raise ValidationError(f"a {self.status.value} verdict has degree {expected}")
        if not 0 <= self.strength <= 1:
            raise ValidationError("verdict strength must lie in [0, 1]")

    @classmethod
    def kept(cls, strength=Fraction(1)):
        return cls(VerdictStatus.KEPT, Fraction(1), Fraction(strength))

    @classmethod
    def broken(cls, strength=Fraction(1)):
        return cls(VerdictStatus.BROKEN, Fraction(0), Fraction(strength))

    @classmethod
    def pending(cls):
        return cls(VerdictStatus.PENDING, None)

    @property
    def decisive(self) -> bool:
        return self.status is not VerdictStatus.PENDING


def _transfers(records, source):
    for record in records:
        if record.kind == "event" and record.get("event") == "transfer" and record.get("from") == source:
            yield record


def _assess_deadline(check: DeadlineEvent, records, now) -> Verdict:
    past_deadline = check.deadline is not None and now > check.deadline
    transfers = list(_transfers(records, check.source))
    if check.exclusive:
        if any(r.get("to") != check.target for r in transfers):
            return Verdict.broken()
        return Verdict.kept() if past_deadline else Verdict.pending()
    hits = [
        r for r in transfers
        if r.get("to") == check.target
        and _rational(r.get("amount")) == check.amount
        and (check.deadline is None or r.time <= check.deadline)
    ]
    if len(hits) >= check.confirmations:
        return Verdict.kept()
    return Verdict.broken() if past_deadline else Verdict.pending()


def _rational(text):
    try:
        return parse_rational(str(text))
    except ValueError:
        return None


def _assess_meadow(check: MeadowCheck, records) -> Verdict:
    env = {}
    for record in records:
        if record.kind == "observe" and "var" in record.payload:
            env[record.get("var")] = parse_rational(record.get("value"))
    if not free_vars(check.expr) <= set(env):
        return Verdict.pending()
    try:
        value = eval_bool(check.expr, env, check.semantics)
    except EvaluationError:
        return Verdict.broken()
    return Verdict.kept() if value is TruthValue.TRUE else Verdict.broken()


def _assess_budget(check: BudgetConformance, records) -> Verdict:
    latest = None
    for record in records:
        if record.kind == "observe" and "account" in record.payload:
            latest = record
    if latest is None:
        return Verdict.pending()
    account = Account({label: parse_rational(v) for label, v in latest.get("entries").items()})
    try:
        if check.budget.closed:
            ok = conforms(account, check.budget, check.shortfall)
        else:
            ok = is_instance_of(account.as_tuplix(), check.budget)
    except BudgetError:
        return Verdict.broken()
    return Verdict.kept() if ok else Verdict.broken()


def _assess_manual(method: AssessmentMethod, records) -> Verdict:
    latest = None
    for record in records:
        if record.kind != "report" or record.get("promise") != method.promise_id:
            continue
        if record.get("by") not in (None, method.observer):
            continue
        latest = record
    if latest is None:
        return Verdict.pending()
    degree = parse_rational(latest.get("degree", "1" if latest.get("status") == "kept" else "0"))
    if latest.get("status") == "kept":
        return Verdict.kept(degree)
    return Verdict.broken(1 - degree)


def assess(method: AssessmentMethod, trace: Trace, now) -> Verdict:
    """Verdict from the public trace up to `now`"""
    records = list(trace.public_until(now))
    check = method.check
    if isinstance(check, DeadlineEvent):
        return _assess_deadline(check, records, now)
    if isinstance(check, MeadowCheck):
        return _assess_meadow(check, records)
    if isinstance(check, BudgetConformance):
        return _assess_budget(check, records)
    return _assess_manual(method, records)


@dataclass(frozen=True)
class TrustLedger:
    entries: dict = field(default_factory=dict)
    default: Fraction = DEFAULT_TRUST

    def trust(self, observer: AgentId, promiser: AgentId) -> Fraction:
        return self.entries.get((observer, promiser), self.default)

    def with_trust(self, observer, promiser, value) -> "TrustLedger":
        return TrustLedger({**self.entries, (observer, promiser): value}, self.default)


def update_trust(ledger: TrustLedger, observer: AgentId, promiser: AgentId, verdict: Verdict,
                 alpha=DEFAULT_ALPHA, beta=DEFAULT_BETA) -> TrustLedger:
    """Additive increase on kept, multiplicative decrease on broken"""
    if not (0 <= alpha <= 1 and 0 <= beta <= 1):
        raise ValidationError("alpha and beta must lie in [0, 1]")
    if not verdict.decisive:
        return ledger
    t = ledger.trust(observer, promiser)
    s = verdict.strength
    if verdict.status is VerdictStatus.KEPT:
        t = t + s * alpha * (1 - t)
    else:
        t = t * (1 - s * (1 - beta))
    return ledger.with_trust(observer, promiser, t)


# Planning

@dataclass(frozen=True)
class TrustCondition:
    promiser: AgentId
    op: str
    threshold: Fraction


@dataclass(frozen=True)
class SeenCondition:
    pattern: RecordPattern


@dataclass(frozen=True)
class HoldsCondition:
    promise_id: str


@dataclass(frozen=True)
class ExpectsCondition:
    promise_id: str


@dataclass(frozen=True)
class EmitEvent:
    pattern: RecordPattern


@dataclass(frozen=True)
class RefuseOffers:
    promiser: AgentId


@dataclass(frozen=True)
class PlanningRule:
    name: str
    agent: AgentId
    conditions: tuple
    action: Union[EmitEvent, RefuseOffers]


@dataclass(frozen=True)
class PlannedAction:
    agent: AgentId
    rule: str
    action: Union[EmitEvent, RefuseOffers]
    due: Fraction
    # latest record that satisfied one of the rule's conditions
    reason: Optional[Record] = field(default=None, compare=False)

    def describe(self) -> str:
        if isinstance(self.action, EmitEvent):
            return f"event {self.action.pattern.describe()}"
        return f"refuse offers from {self.action.promiser}"


_OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


def _holds(condition, agent, instances, expectations, ledger, records) -> bool:
    if isinstance(condition, TrustCondition):
        return _OPS[condition.op](ledger.trust(agent, condition.promiser), condition.threshold)
    if isinstance(condition, SeenCondition):
        return any(condition.pattern.matches(r) for r in records)
    if isinstance(condition, HoldsCondition):
        return any(i.holder == agent and i.promise_id == condition.promise_id for i in instances)
    return any(e.holder == agent and e.promise_id == condition.promise_id for e in expectations)


def _reason(rule, agent, records) -> Optional[Record]:
    """Latest record behind the rule's seen and trust conditions"""
    found = []
    for condition in rule.conditions:
        if isinstance(condition, SeenCondition):
            found.extend(r for r in records if condition.pattern.matches(r))
        elif isinstance(condition, TrustCondition):
            found.extend(r for r in records if r.kind == "trust" and r.get("observer") == agent
                         and r.get("promiser") == condition.promiser)
    return max(found, key=lambda r: r.seq, default=None)


def plan_next(agent: AgentId, instances, expectations, ledger: TrustLedger, rules, trace: Trace, now,
              tick=Fraction(1), fired=frozenset()) -> list:
    """Actions due at the next tick from `agent`'s rules, in declaration order.

    A rule fires at most once; `fired` holds the names that already have.
    """
    records = list(trace.public_until(now))
    planned = []
    for rule in rules:
        if rule.agent != agent or rule.name in fired:
            continue
        if all(_holds(c, agent, instances, expectations, ledger, records) for c in rule.conditions):
            planned.append(PlannedAction(agent, rule.name, rule.action, Fraction(now) + tick,
                                         _reason(rule, agent, records)))
    return planned
