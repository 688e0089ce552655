"""Scenario files: declarations plus time-ordered scripted actions.

Each line is parsed on its own and visited into a declaration or an action.
Errors carry the line and column they were found at.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Union

from arpeggio import NoMatch, PTNodeVisitor, visit_parse_tree

from . import dsl
from .assessment import (
    EmitEvent, ExpectsCondition, HoldsCondition, PlanningRule, RefuseOffers, SeenCondition, TrustCondition,
)
from .config import DEFAULT_CONFIG, check_setting
from .errors import (
    BudgetError, ConfigError, ExpressionSyntaxError, ScenarioSyntaxError, ValidationError,
)
from .expr import parse_proposition, parse_term
from .log import Logger
from .meadow import Semantics, eval_arith, parse_rational
from .promise import (
    BudgetClaim, ImplicationRule, MeadowProposition, OpaqueText, PromiseBody, PromiseDraft, PromiseKind,
    Quantity, TransferClaim, agent_id,
)
from .trace import RecordPattern
from .tuplix import Account, Substitution, Tuplix, compose, instantiate


@dataclass(frozen=True)
class IssuePromise:
    time: Fraction
    draft: PromiseDraft
    half_life: Optional[Fraction] = None
    internal: bool = False
    combined: bool = False


@dataclass(frozen=True)
class MakeOffer:
    time: Fraction
    offer_id: str
    draft: PromiseDraft
    condition: str
    half_life: Optional[Fraction] = None


@dataclass(frozen=True)
class AcceptOffer:
    time: Fraction
    offer_id: str
    acceptor: str


@dataclass(frozen=True)
class Decide:
    time: Fraction
    decision_id: Optional[str]
    decider: str
    role: str
    content: PromiseBody
    jurisdiction: frozenset = frozenset()
    internal: bool = False
    promissory: bool = False
    trigger: Optional[RecordPattern] = None
    actor: Optional[str] = None
    deactivates: Optional[str] = None


@dataclass(frozen=True)
class TriggerEvent:
    time: Fraction
    kind: str
    fields: tuple = ()


@dataclass(frozen=True)
class Observe:
    time: Fraction
    fact: Optional[str] = None
    var: Optional[str] = None
    value: Optional[Fraction] = None
    account_name: Optional[str] = None
    account: Optional[Account] = None


@dataclass(frozen=True)
class ManualVerdict:
    time: Fraction
    promise_id: str
    status: str
    degree: Optional[Fraction] = None
    by: Optional[str] = None


@dataclass(frozen=True)
class Tick:
    time: Fraction


ScriptedAction = Union[IssuePromise, MakeOffer, AcceptOffer, Decide, TriggerEvent, Observe, ManualVerdict, Tick]


@dataclass
class Scenario:
    name: str = "scenario"
    agents: tuple = ()
    events: list = field(default_factory=list)
    implication_rules: list = field(default_factory=list)
    planning_rules: list = field(default_factory=list)
    settings: dict = field(default_factory=dict)
    readings: dict = field(default_factory=dict)
    tuplices: dict = field(default_factory=dict)
    substitutions: dict = field(default_factory=dict)
    accounts: dict = field(default_factory=dict)


class _LineError(Exception):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


def _first(results, default=None):
    return results[0] if results else default


class ScenarioParser(PTNodeVisitor):
    """Builds a Scenario line by line.

    Each line is parsed on its own and visited bottom up: role-named rules
    become agents, rationals and patterns, and the statement rules at the
    top either declare something or append a scripted action.
    """

    def __init__(self, name="scenario"):
        super().__init__()
        self.log = Logger("Scenario")
        self.scenario = Scenario(name=name)
        self.time = None
        self.counters = {"promise": 0, "decision": 0, "idocc": 0}
        self.issued = set()

    def parse(self, text: str) -> Scenario:
        trees = []
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                trees.append((number, raw, dsl.parse_line(raw)))
            except NoMatch as e:
                raise ScenarioSyntaxError(f"syntax error: {e}", number, e.col) from None

        # agents are declared before anything refers to them, wherever the line sits
        for number, raw, tree in sorted(trees, key=lambda t: t[2][0].rule_name != "agents_stmt"):
            try:
                visit_parse_tree(tree, self)
            except _LineError as e:
                col = e.node.position + 1 if e.node is not None else len(raw) - len(raw.lstrip()) + 1
                raise ScenarioSyntaxError(str(e), number, col) from None
            except (ValidationError, BudgetError, ExpressionSyntaxError) as e:
                raise ScenarioSyntaxError(str(e), number, len(raw) - len(raw.lstrip()) + 1) from None
        self.log.info("Parsed scenario %s: %d agents, %d actions",
                      self.scenario.name, len(self.scenario.agents), len(self.scenario.events))
        return self.scenario

    def _agent(self, node):
        if node.value not in self.scenario.agents:
            raise _LineError(f"undeclared agent {node.value}", node)
        return agent_id(node.value)

    def _rational(self, node):
        try:
            return parse_rational(node.value)
        except ValueError as e:
            raise _LineError(str(e), node) from None

    def _known_promise(self, promise_id):
        return promise_id in self.issued or any(promise_id.startswith(p + ".") for p in self.issued)

    def _next_id(self, counter, prefix):
        self.counters[counter] += 1
        return f"{prefix}#{self.counters[counter]}"

    # Names

    def _node(self, node, children):
        return node

    visit_agent_name = visit_budget_name = visit_subst_name = visit_account_name = visit_setting_key = _node

    def _agent_ref(self, node, children):
        return self._agent(node)

    visit_promiser = visit_promisee = visit_scope_member = visit_jurisdiction_member = _agent_ref
    visit_acceptor = visit_decider = visit_actor_name = visit_verdict_by = _agent_ref
    visit_plan_agent = visit_trust_target = visit_refused_agent = _agent_ref

    def visit_parent_id(self, node, children):
        if not self._known_promise(node.value):
            raise _LineError(f"unknown parent promise {node.value}", node)
        return node.value

    # Values

    def visit_time_value(self, node, children):
        time = self._rational(node)
        if time < 0:
            raise _LineError("scenario times start at 0", node)
        if self.time is not None and time < self.time:
            raise _LineError(f"time regression: {time} after {self.time}", node)
        self.time = time
        return time

    def _rational_value(self, node, children):
        return self._rational(node)

    visit_deadline_value = visit_half_life_value = visit_degree_value = visit_shortfall_value = _rational_value
    visit_amount = visit_threshold = visit_observed_value = visit_qvalue = _rational_value

    def visit_field_number(self, node, children):
        return str(self._rational(node))

    def visit_confirmations(self, node, children):
        return int(node.value)

    def _quoted(self, node, children):
        return node.value[1:-1]

    visit_field_quoted = visit_entry_quoted = visit_condition_text = visit_fact_text = _quoted
    visit_match_regex = visit_opaque = visit_meadow_text = _quoted

    def visit_semantics_name(self, node, children):
        return Semantics(node.value)

    def _flag(self, node, children):
        return True

    visit_silent_flag = visit_incidental_flag = visit_discrepancy_flag = visit_combined_flag = _flag
    visit_internal_flag = visit_promissory_flag = visit_underlying_none = _flag

    def _only_child(self, node, children):
        return children[0]

    visit_action = visit_condition = visit_plan_action = _only_child

    # Shared pieces

    def visit_field(self, node, children):
        value = children.field_quoted + children.field_number + children.field_word
        return children.field_key[0], value[0]

    def visit_pattern(self, node, children):
        return RecordPattern(children.event_kind[0], tuple(children.field))

    def visit_scope(self, node, children):
        return frozenset(children.scope_member)

    def visit_jurisdiction(self, node, children):
        return frozenset(children.jurisdiction_member)

    def visit_entry(self, node, children):
        source = children.entry_quoted + children.entry_number
        return children.entry_label[0], source[0], node

    def visit_entries(self, node, children):
        return list(children.entry)

    def _entries(self, entries, closed=False):
        result = {}
        for label, source, node in entries:
            if label in result:
                raise _LineError(f"duplicate label {label}", node)
            result[label] = parse_term(source)
            if closed:
                result[label] = eval_arith(result[label], {})
        return result

    # Payloads and bodies

    def visit_meadow_payload(self, node, children):
        source = children.meadow_text[0]
        return MeadowProposition(parse_proposition(source), source)

    def visit_transfer_payload(self, node, children):
        return TransferClaim(children.amount[0], children.source_account[0], children.target_account[0],
                             confirmations=_first(children.confirmations))

    def visit_exclusive_payload(self, node, children):
        return TransferClaim(Fraction(0), children.source_account[0], children.target_account[0], exclusive=True)

    def visit_budget_payload(self, node, children):
        name_node = children.budget_name[0]
        if name_node.value not in self.scenario.tuplices:
            raise _LineError(f"unknown tuplix {name_node.value}", name_node)
        label = name_node.value
        sigma = Substitution({})
        for subst in children.subst_name:
            if subst.value not in self.scenario.substitutions:
                raise _LineError(f"unknown substitution {subst.value}", subst)
            sigma = compose(self.scenario.substitutions[subst.value], sigma)
            label = f"{subst.value}({label})"
        budget = instantiate(self.scenario.tuplices[name_node.value], sigma)
        return BudgetClaim(label, budget, _first(children.shortfall_value, Fraction(0)))

    def visit_qitem(self, node, children):
        return Quantity(children.qname[0], children.qvalue[0], _first(children.unit, ""))

    def visit_quantity(self, node, children):
        return tuple(children.qitem)

    def _body(self, children):
        for payload in ("meadow_payload", "transfer_payload", "exclusive_payload", "budget_payload"):
            if getattr(children, payload):
                quality = getattr(children, payload)[0]
                break
        else:
            quality = OpaqueText(children.opaque[0])
        return PromiseBody(quality, _first(children.quantity, ()))

    def visit_body(self, node, children):
        return self._body(children)

    def visit_underlying_opt(self, node, children):
        if children.underlying_none:
            return ""
        return self._body(children).describe()

    # Options

    def visit_deadline_opt(self, node, children): return children.deadline_value[0]
    def visit_half_life_opt(self, node, children): return children.half_life_value[0]
    def visit_implied_opt(self, node, children): return children.parent_id[0]
    def visit_role_opt(self, node, children): return children.role_name[0]
    def visit_trigger_opt(self, node, children): return children.pattern[0]
    def visit_actor_opt(self, node, children): return children.actor_name[0]
    def visit_deactivates_opt(self, node, children): return children.deactivated_id[0]

    def visit_promise_option(self, node, children):
        return node[0].rule_name, children[0]

    visit_decide_option = visit_promise_option

    # Timed actions

    def _draft(self, children, promise_id, deadline=None, **kwargs):
        body = children.body[0]
        if deadline is not None:
            body = replace(body, deadline=deadline)
        return PromiseDraft(
            promiser=children.promiser[0],
            promisee=children.promisee[0],
            scope=children.scope[0],
            body=body,
            promise_id=promise_id,
            **kwargs,
        )

    def visit_promise_action(self, node, children):
        options = dict(children.promise_option)
        internal = "internal_flag" in options
        promise_id = _first(children.promise_id)
        if promise_id is None:
            promise_id = self._next_id("idocc", "I") if internal else self._next_id("promise", "")
        kind, parent = PromiseKind.EXPLICIT, None
        if "silent_flag" in options:
            kind = PromiseKind.SILENT
        if "implied_opt" in options:
            kind, parent = PromiseKind.IMPLIED, options["implied_opt"]
        draft = self._draft(
            children, promise_id, options.get("deadline_opt"),
            underlying_intention=options.get("underlying_opt"),
            committed="incidental_flag" not in options,
            discrepancy_public="discrepancy_flag" in options,
            kind=kind,
            parent=parent,
        )
        if not internal:
            self.issued.add(promise_id)
        return IssuePromise(self.time, draft, options.get("half_life_opt"),
                            internal=internal, combined="combined_flag" in options)

    def visit_offer_action(self, node, children):
        offer_id = children.offer_id[0]
        self.issued.add(offer_id)
        return MakeOffer(self.time, offer_id, self._draft(children, offer_id, _first(children.deadline_opt)),
                         children.condition_text[0], _first(children.half_life_opt))

    def visit_accept_action(self, node, children):
        return AcceptOffer(self.time, children.offer_id[0], children.acceptor[0])

    def visit_decide_action(self, node, children):
        options = dict(children.decide_option)
        internal = "internal_flag" in options
        decision_id = _first(children.decision_id)
        if decision_id is None:
            decision_id = self._next_id("idocc", "I") if internal else self._next_id("decision", "D")
        return Decide(
            time=self.time,
            decision_id=decision_id,
            decider=children.decider[0],
            role=options.get("role_opt", "agent"),
            content=children.body[0],
            jurisdiction=_first(children.jurisdiction, frozenset()),
            internal=internal,
            promissory="promissory_flag" in options,
            trigger=options.get("trigger_opt"),
            actor=options.get("actor_opt"),
            deactivates=options.get("deactivates_opt"),
        )

    def visit_event_action(self, node, children):
        return TriggerEvent(self.time, children.event_kind[0], tuple(children.field))

    def visit_observe_binding(self, node, children):
        return children.observed_var[0], children.observed_value[0]

    def visit_observe_account(self, node, children):
        name_node = children.account_name[0]
        if name_node.value not in self.scenario.accounts:
            raise _LineError(f"unknown account {name_node.value}", name_node)
        return name_node.value

    def visit_observe_action(self, node, children):
        if children.observe_binding:
            var, value = children.observe_binding[0]
            return Observe(self.time, var=var, value=value)
        if children.observe_account:
            name = children.observe_account[0]
            return Observe(self.time, account_name=name, account=self.scenario.accounts[name])
        return Observe(self.time, fact=children.fact_text[0])

    def visit_verdict_action(self, node, children):
        return ManualVerdict(self.time, children.verdict_promise[0], children.verdict_status[0],
                             _first(children.degree_value), _first(children.verdict_by))

    def visit_tick_action(self, node, children):
        return Tick(self.time)

    # Conditions and planned actions

    def visit_trust_cond(self, node, children):
        return TrustCondition(children.trust_target[0], children.cmp_op[0], children.threshold[0])

    def visit_seen_cond(self, node, children):
        return SeenCondition(children.pattern[0])

    def visit_holds_cond(self, node, children):
        return HoldsCondition(children.held_promise[0])

    def visit_expects_cond(self, node, children):
        return ExpectsCondition(children.expected_promise[0])

    def visit_emit_action(self, node, children):
        return EmitEvent(children.pattern[0])

    def visit_refuse_action(self, node, children):
        return RefuseOffers(children.refused_agent[0])

    # Statements

    def visit_agents_stmt(self, node, children):
        agents = list(self.scenario.agents)
        for name in children.agent_name:
            if name.value in agents:
                raise _LineError(f"agent {name.value} declared twice", name)
            agents.append(name.value)
        self.scenario.agents = tuple(agents)

    def visit_config_stmt(self, node, children):
        key = children.setting_key[0]
        if key.value not in DEFAULT_CONFIG:
            raise _LineError(f"unknown setting {key.value}", key)
        try:
            self.scenario.settings[key.value] = check_setting(key.value, children.setting_value[0])
        except ConfigError as e:
            raise _LineError(str(e), key) from None

    def visit_reading_stmt(self, node, children):
        self.scenario.readings[self._agent(children.agent_name[0])] = children.semantics_name[0]

    def visit_tuplix_stmt(self, node, children):
        entries = self._entries(children.entries[0])
        self.scenario.tuplices[children.budget_name[0].value] = Tuplix(entries, frozenset(children.var_name))

    def visit_subst_stmt(self, node, children):
        self.scenario.substitutions[children.subst_name[0].value] = Substitution(self._entries(children.entries[0]))

    def visit_account_stmt(self, node, children):
        entries = self._entries(children.entries[0], closed=True)
        self.scenario.accounts[children.account_name[0].value] = Account(entries)

    def visit_imply_stmt(self, node, children):
        self.scenario.implication_rules.append(ImplicationRule(
            name=children.rule_name[0],
            pattern=children.match_regex[0],
            promisee=children.promisee[0],
            scope=children.scope[0],
            body=children.body[0],
        ))

    def visit_plan_stmt(self, node, children):
        name, agent = children.rule_name[0], children.plan_agent[0]
        if any(r.name == name and r.agent == agent for r in self.scenario.planning_rules):
            raise _LineError(f"duplicate planning rule {name} for {agent}")
        self.scenario.planning_rules.append(
            PlanningRule(name, agent, tuple(children.condition), children.plan_action[0]))

    def visit_timed_stmt(self, node, children):
        self.scenario.events.append(children.action[0])


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    return ScenarioParser(name).parse(text)
