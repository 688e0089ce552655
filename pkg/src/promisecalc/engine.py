import hashlib
from collections import deque
from dataclasses import replace
from fractions import Fraction

from .assessment import (
    EmitEvent, TrustLedger, assess, derive_expectations, generate_method, plan_next, spawn_reasoning, update_trust,
)
from .config import Config
from .decision import (
    combine_promise_with_promissory_decision, deactivate_idocc, take_decision, take_internal_decision,
    take_promissory_decision, trigger_idocc,
)
from .errors import OfferRejected, PromiseCalcError, ValidationError
from .eventbus import EventBus
from .log import Logger, LogManager
from .meadow import Semantics, render_rational
from .promise import (
    BudgetClaim, MeadowProposition, PromiseKind, TransferClaim, accept_offer, derive_implied_promises, distribute,
    erode_instances, issue_promise, make_offer,
)
from .report import report
from .scenario import AcceptOffer, Decide, IssuePromise, MakeOffer, ManualVerdict, Observe, Tick, TriggerEvent
from .trace import Trace


class Simulator:
    def __init__(self, scenario, config=None, overrides=None):
        self.config = config or Config()
        self.config.update(scenario.settings)
        self.config.update(overrides or {})
        self.log = Logger("Engine")
        LogManager.get_instance().level = self.config.loglevel

        self.scenario = scenario
        self.trace = Trace()
        self.now = Fraction(0)

        self.event_bus = EventBus()
        self.event_bus.add_listener("record", self._watch_idoccs)
        self.event_bus.add_listener("verdict", self._maintain_trust)

        self.promises = {}
        self.instances = {}       # (promise, holder) -> instance as received
        self.instance_records = {}
        self.live = {}            # (promise, holder) -> instance after erosion
        self.methods = {}
        self.expectations = {}
        self.finalized = {}
        self.ledger = TrustLedger(default=self.config.initial_trust)
        self.offers = {}
        self.refusals = set()
        self.idoccs = {}
        self.fired = set()
        self.scheduled = {}

        self.handlers = {
            IssuePromise: self._issue,
            MakeOffer: self._offer,
            AcceptOffer: self._accept,
            Decide: self._decide,
            TriggerEvent: self._event,
            Observe: self._observe,
            ManualVerdict: self._manual_verdict,
            Tick: self._tick,
        }

    def run(self) -> Trace:
        """Play the scenario to its end and return the trace"""
        self.log.info("Running %s with %d scripted actions", self.scenario.name, len(self.scenario.events))
        salt = hashlib.sha256(f"{self.config.seed}:{self.scenario.name}".encode()).hexdigest()[:16]
        self._emit("run", {"scenario": self.scenario.name, "agents": list(self.scenario.agents), "salt": salt})

        pending = deque(self.scenario.events)
        while pending or self.scheduled:
            candidates = [min(self.scheduled)] if self.scheduled else []
            if pending:
                candidates.append(pending[0].time)
            self.now = min(candidates)
            before = len(self.trace.public)
            while pending and pending[0].time == self.now:
                self._perform(pending.popleft())
            due = self.scheduled.pop(self.now, [])
            for planned, cause in due:
                self._apply_planned(planned, cause)
            # private-only activity never opens a tick
            if len(self.trace.public) > before:
                self._end_of_tick(self.trace.public[before])
            elif due:
                self._end_of_tick(due[0][1])

        self._finish()
        return self.trace

    def summary(self):
        return report(self.trace, self.config.meadow_bound)

    # Recording

    def _emit(self, kind, payload, private=False, cause=None, scripted=False):
        payload = dict(payload)
        if scripted:
            payload["scripted"] = True
        if cause is not None:
            payload["cause"] = cause.seq
            if cause.private:
                payload["cause_private"] = True
        record = self.trace.append(self.now, kind, payload, private)
        if not private:
            self.event_bus.emit("record", record)
        return record

    def _perform(self, action):
        try:
            self.handlers[type(action)](action)
        except PromiseCalcError as e:
            self.log.warning("%s at %s failed: %s", type(action).__name__, self.now, e)
            private = isinstance(action, (Decide, IssuePromise)) and (
                getattr(action, "internal", False) or getattr(action, "deactivates", None) is not None)
            self._emit("error", {"action": type(action).__name__, "message": str(e)},
                       private=private, scripted=True)

    # Promises

    def _promise_payload(self, record):
        body = record.body
        payload = {
            "id": record.promise_id,
            "promiser": record.promiser,
            "promisee": record.promisee,
            "scope": record.scope,
            "kind": record.kind,
            "body": body.describe(),
        }
        if record.parent is not None:
            payload["parent"] = record.parent
        if body.deadline is not None:
            payload["deadline"] = body.deadline
        quality = body.quality
        if isinstance(quality, MeadowProposition):
            payload["meadow"] = quality.text
        elif isinstance(quality, BudgetClaim):
            payload["budget"] = {
                "name": quality.name,
                "entries": quality.budget.describe(),
                "vars": quality.budget.free_vars,
                "shortfall": quality.shortfall,
            }
        elif isinstance(quality, TransferClaim):
            payload["transfer"] = {"from": quality.source, "to": quality.target, "exclusive": quality.exclusive}
        return payload

    def _check_new_promise(self, promise_id):
        if promise_id in self.promises:
            raise ValidationError(f"promise {promise_id} already issued")

    def _publish_promise(self, record, instances, scripted=False, cause=None):
        rec = self._emit("promise", self._promise_payload(record), cause=cause, scripted=scripted)
        self.promises[record.promise_id] = record
        self._emit("intention", {
            "promise": record.promise_id,
            "underlying": record.draft.underlying,
            "classification": record.classification,
        }, private=True, cause=rec)
        for instance in instances:
            self._distribute(record, instance, rec)
        if record.kind is not PromiseKind.IMPLIED:
            for implied in derive_implied_promises(record, self.scenario.implication_rules):
                if implied.promise_id in self.promises:
                    continue
                self._publish_promise(implied, distribute(implied, self.config.half_life), cause=rec)
        return rec

    def _distribute(self, record, instance, cause):
        key = (instance.promise_id, instance.holder)
        rec = self._emit("instance", {
            "promise": instance.promise_id,
            "holder": instance.holder,
            "half_life": instance.half_life,
        }, cause=cause)
        self.instances[key] = instance
        self.instance_records[key] = rec
        self.live[key] = instance
        for process in spawn_reasoning(instance):
            self._emit("process", {"holder": process.holder, "promise": process.promise_id,
                                   "process": process.process}, cause=rec)
        self.expectations[key] = derive_expectations(instance, record.body, self.config.confirmations)
        for expectation in self.expectations[key]:
            payload = {"holder": expectation.holder, "promise": expectation.promise_id,
                       "proposition": expectation.proposition}
            if expectation.valid_until is not None:
                payload["valid_until"] = expectation.valid_until
            self._emit("expectation", payload, cause=rec)
        semantics = self.scenario.readings.get(instance.holder, Semantics.MEADOW_TOTAL)
        method = generate_method(instance, record.body, semantics, self.config.confirmations)
        self.methods[key] = method
        self._emit("method", {"observer": method.observer, "promise": method.promise_id,
                              "method": method.kind, "detail": method.describe()}, cause=rec)

    def _issue(self, action):
        draft = action.draft
        half_life = action.half_life or self.config.half_life
        if action.internal:
            self._load_idocc(take_internal_decision(draft.promiser, draft.body, None, self.now, draft.promise_id),
                             memorized=True)
            return
        if draft.parent is not None and draft.parent not in self.promises:
            raise ValidationError(f"implied promise {draft.promise_id} names unknown parent {draft.parent}")
        self._check_new_promise(draft.promise_id)
        if action.combined:
            record, instances, outcome, obligation = combine_promise_with_promissory_decision(
                draft, self.now, half_life=half_life)
            rec = self._publish_promise(record, instances, scripted=True)
            decision = self._publish_decision(outcome, promissory=True, cause=rec)
            self._publish_obligation(obligation, decision)
            return
        record, instances = issue_promise(draft, self.now, half_life)
        self._publish_promise(record, instances, scripted=True)

    def _offer(self, action):
        if action.offer_id in self.offers or action.offer_id in self.promises:
            raise ValidationError(f"offer {action.offer_id} already made")
        offer = make_offer(action.draft, action.condition, action.offer_id)
        self.offers[offer.offer_id] = (offer, action.half_life)
        self._emit("offer", {
            "id": offer.offer_id,
            "promiser": offer.draft.promiser,
            "promisee": offer.draft.promisee,
            "scope": offer.draft.scope,
            "body": offer.draft.body.describe(),
            "condition": offer.condition,
        }, scripted=True)

    def _accept(self, action):
        if action.offer_id not in self.offers:
            raise ValidationError(f"unknown offer {action.offer_id}")
        offer, half_life = self.offers[action.offer_id]
        if (action.acceptor, offer.draft.promiser) in self.refusals:
            raise OfferRejected(f"{action.acceptor} refuses offers from {offer.draft.promiser}")
        offered, used = accept_offer(offer, action.acceptor, self.now)
        self._check_new_promise(offered.promise_id)
        self._check_new_promise(used.promise_id)
        self.offers[action.offer_id] = (replace(offer, accepted=True), half_life)
        rec = self._emit("accept", {"offer": offer.offer_id, "acceptor": action.acceptor}, scripted=True)
        half_life = half_life or self.config.half_life
        self._publish_promise(offered, distribute(offered, half_life), cause=rec)
        self._publish_promise(used, distribute(used, self.config.half_life), cause=rec)

    # Decisions

    def _idocc_payload(self, idocc):
        payload = {"id": idocc.idocc_id, "owner": idocc.owner, "content": idocc.content.describe(),
                   "state": idocc.state}
        if idocc.trigger is not None:
            payload["trigger"] = idocc.trigger.describe()
        return payload

    def _load_idocc(self, idocc, memorized=False, obligation=None, deactivated=None):
        if idocc.idocc_id in self.idoccs:
            raise ValidationError(f"internal decision {idocc.idocc_id} already taken")
        payload = self._idocc_payload(idocc)
        if memorized:
            payload["memorized"] = True
        rec = self._emit("idocc", payload, private=True, scripted=True)
        self.idoccs[idocc.idocc_id] = idocc
        if obligation is not None:
            self._publish_obligation(obligation, rec)
        if deactivated is not None:
            self._set_idocc(deactivated, rec)

    def _set_idocc(self, idocc, cause):
        self.idoccs[idocc.idocc_id] = idocc
        self._emit("idocc-state", {"id": idocc.idocc_id, "state": idocc.state}, private=True, cause=cause)

    def _publish_decision(self, outcome, promissory=False, cause=None, scripted=False):
        rec = self._emit("decision", {
            "id": outcome.decision_id,
            "decider": outcome.decider,
            "role": outcome.role,
            "content": outcome.content.describe(),
            "jurisdiction": outcome.jurisdiction,
            "promissory": promissory,
        }, cause=cause, scripted=scripted)
        for agent in outcome.notified():
            self._emit("notify", {"decision": outcome.decision_id, "agent": agent}, cause=rec)
        return rec

    def _publish_obligation(self, obligation, cause):
        self._emit("obligation", {
            "obligor": obligation.obligor,
            "content": obligation.content.describe(),
            "source": obligation.source.describe(),
        }, private=obligation.internal, cause=cause)

    def _deactivation(self, action, decision):
        if action.deactivates is None:
            return None
        if action.deactivates not in self.idoccs:
            raise ValidationError(f"unknown internal decision {action.deactivates}")
        return deactivate_idocc(self.idoccs[action.deactivates], decision)

    def _decide(self, action):
        obligation = None
        if action.internal:
            if action.promissory:
                idocc, obligation = take_promissory_decision(
                    action.decider, action.role, action.content, action.jurisdiction, self.now, internal=True,
                    actor=action.actor, trigger=action.trigger, decision_id=action.decision_id)
            else:
                idocc = take_internal_decision(action.decider, action.content, action.trigger, self.now,
                                               action.decision_id)
            self._load_idocc(idocc, obligation=obligation, deactivated=self._deactivation(action, idocc))
            return
        if action.promissory:
            outcome, obligation = take_promissory_decision(
                action.decider, action.role, action.content, action.jurisdiction, self.now,
                actor=action.actor, decision_id=action.decision_id)
        else:
            outcome = take_decision(action.decider, action.role, action.content, action.jurisdiction, self.now,
                                    action.decision_id)
        deactivated = self._deactivation(action, outcome)
        rec = self._publish_decision(outcome, action.promissory, scripted=True)
        if obligation is not None:
            self._publish_obligation(obligation, rec)
        if deactivated is not None:
            self._set_idocc(deactivated, rec)

    def _watch_idoccs(self, record):
        for idocc_id in list(self.idoccs):
            # a nested emit may already have moved this one on
            idocc = self.idoccs[idocc_id]
            updated, actions = trigger_idocc(idocc, record)
            if updated is idocc:
                continue
            self.log.debug("Internal decision %s fired on %s #%d", idocc_id, record.kind, record.seq)
            self._set_idocc(updated, record)
            for effect in actions:
                self._emit("event", {"event": effect.kind, **dict(effect.fields), "actor": effect.actor},
                           cause=record)

    # Plain scripted records

    def _event(self, action):
        self._emit("event", {"event": action.kind, **dict(action.fields)}, scripted=True)

    def _observe(self, action):
        if action.var is not None:
            payload = {"var": action.var, "value": action.value}
        elif action.account is not None:
            payload = {"account": action.account_name, "entries": action.account.entries}
        else:
            payload = {"fact": action.fact}
        self._emit("observe", payload, scripted=True)

    def _manual_verdict(self, action):
        payload = {"promise": action.promise_id, "status": action.status}
        if action.degree is not None:
            payload["degree"] = action.degree
        if action.by is not None:
            payload["by"] = action.by
        self._emit("report", payload, scripted=True)

    def _tick(self, action):
        self._emit("tick", {}, scripted=True)

    # End of tick: erosion, assessment, trust, planning

    def _end_of_tick(self, opening):
        self._erode()
        for key in list(self.instances):
            if key in self.finalized or key not in self.live:
                continue
            verdict = assess(self.methods[key], self.trace, self.now)
            if verdict.decisive:
                self._finalize(key, verdict)
        self._plan(opening)

    def _erode(self):
        for key, received in self.instances.items():
            if key not in self.live:
                continue
            kept = erode_instances([received], self.now - received.received_time, self.config.drop_threshold)
            if kept:
                self.live[key] = kept[0]
            else:
                del self.live[key]
                self._emit("drop", {"promise": key[0], "holder": key[1]}, cause=self.instance_records[key])

    def _verdict_payload(self, key, verdict):
        payload = {"observer": key[1], "promise": key[0], "status": verdict.status}
        if verdict.degree is not None:
            payload["degree"] = verdict.degree
            payload["strength"] = verdict.strength
        return payload

    def _finalize(self, key, verdict):
        self.finalized[key] = verdict
        rec = self._emit("verdict", self._verdict_payload(key, verdict), cause=self.instance_records[key])
        self.event_bus.emit("verdict", (key, verdict, rec))

    def _maintain_trust(self, event):
        (promise_id, observer), verdict, cause = event
        promiser = self.promises[promise_id].promiser
        self.ledger = update_trust(self.ledger, observer, promiser, verdict, self.config.alpha, self.config.beta)
        self._emit("trust", {"observer": observer, "promiser": promiser,
                             "value": self.ledger.trust(observer, promiser)}, cause=cause)

    def _plan(self, opening):
        instances = list(self.live.values())
        expectations = [e for key in self.live for e in self.expectations.get(key, [])]
        for agent in self.scenario.agents:
            fired = frozenset(name for a, name in self.fired if a == agent)
            planned = plan_next(agent, instances, expectations, self.ledger, self.scenario.planning_rules,
                                self.trace, self.now, self.config.tick, fired)
            for action in planned:
                self.fired.add((agent, action.rule))
                rec = self._emit("plan", {"agent": agent, "rule": action.rule, "action": action.describe(),
                                          "due": action.due}, cause=action.reason or opening)
                self.scheduled.setdefault(action.due, []).append((action, rec))

    def _apply_planned(self, planned, cause):
        if isinstance(planned.action, EmitEvent):
            pattern = planned.action.pattern
            self._emit("event", {"event": pattern.kind, **dict(pattern.fields), "actor": planned.agent}, cause=cause)
        else:
            self.refusals.add((planned.agent, planned.action.promiser))
            self._emit("refusal", {"agent": planned.agent, "promiser": planned.action.promiser}, cause=cause)

    def _finish(self):
        for key in self.instances:
            if key not in self.finalized:
                rec = self.instance_records[key]
                self._emit("verdict", {"observer": key[1], "promise": key[0], "status": "pending"}, cause=rec)
        for key, instance in self.live.items():
            self._emit("retain", {"promise": key[0], "holder": key[1], "confidence": instance.confidence},
                       cause=self.instance_records[key])
        self._emit("end", {"promises": len(self.promises), "instances": len(self.instances)})
        self.log.info("Finished %s at time %s", self.scenario.name, render_rational(self.now))
