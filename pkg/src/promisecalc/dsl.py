"""Grammar of a single scenario line.

Rules are named after the role their text plays (`promiser`,
`deadline_value`, ...), so a visitor can turn each one into the value the
scenario needs with one `visit_<rule>` method.
"""
from arpeggio import EOF, Optional, ParserPython, ZeroOrMore
from arpeggio import RegExMatch as _

IDENT = r"[A-Za-z_][\w.#]*"
RATIONAL = r"[+-]?\d+(/\d+)?"
QUOTED = r'"[^"]*"'


def kw(word):
    return _(word + r"\b")


# Names in their roles
def agent_name(): return _(IDENT)
def promiser(): return _(IDENT)
def promisee(): return _(IDENT)
def scope_member(): return _(IDENT)
def jurisdiction_member(): return _(IDENT)
def promise_id(): return _(IDENT)
def parent_id(): return _(IDENT)
def offer_id(): return _(IDENT)
def acceptor(): return _(IDENT)
def decision_id(): return _(IDENT)
def decider(): return _(IDENT)
def role_name(): return _(IDENT)
def actor_name(): return _(IDENT)
def deactivated_id(): return _(IDENT)
def source_account(): return _(IDENT)
def target_account(): return _(IDENT)
def budget_name(): return _(IDENT)
def subst_name(): return _(IDENT)
def account_name(): return _(IDENT)
def rule_name(): return _(IDENT)
def plan_agent(): return _(IDENT)
def trust_target(): return _(IDENT)
def refused_agent(): return _(IDENT)
def held_promise(): return _(IDENT)
def expected_promise(): return _(IDENT)
def verdict_promise(): return _(IDENT)
def verdict_by(): return _(IDENT)
def setting_key(): return _(IDENT)
def var_name(): return _(IDENT)
def entry_label(): return _(IDENT)
def qname(): return _(IDENT)
def unit(): return _(IDENT)
def observed_var(): return _(IDENT)
def event_kind(): return _(r"[A-Za-z_][\w.-]*")
def field_key(): return _(r"[A-Za-z_]\w*")

# Values in their roles
def time_value(): return _(RATIONAL)
def deadline_value(): return _(RATIONAL)
def half_life_value(): return _(RATIONAL)
def degree_value(): return _(RATIONAL)
def shortfall_value(): return _(RATIONAL)
def amount(): return _(RATIONAL)
def confirmations(): return _(r"\d+")
def threshold(): return _(RATIONAL)
def observed_value(): return _(RATIONAL)
def qvalue(): return _(RATIONAL)
def setting_value(): return _(r"[^\s]+")
def semantics_name(): return _(r"(total|partial|kleene)\b")
def verdict_status(): return _(r"(kept|broken)\b")
def cmp_op(): return _(r"<=|>=|!=|<|>|=")
def field_quoted(): return _(QUOTED)
def field_number(): return _(RATIONAL)
def field_word(): return _(IDENT)
def entry_quoted(): return _(QUOTED)
def entry_number(): return _(RATIONAL)
def condition_text(): return _(QUOTED)
def fact_text(): return _(QUOTED)
def match_regex(): return _(QUOTED)
def opaque(): return _(QUOTED)
def meadow_text(): return _(QUOTED)

# Shared pieces
def field(): return field_key, "=", [field_quoted, field_number, field_word]
def pattern(): return "(", event_kind, ZeroOrMore(field), ")"
def scope(): return kw("scope"), "{", scope_member, ZeroOrMore(",", scope_member), "}"
def jurisdiction(): return kw("jurisdiction"), "{", Optional(jurisdiction_member, ZeroOrMore(",", jurisdiction_member)), "}"
def entry(): return entry_label, ":", [entry_quoted, entry_number]
def entries(): return "{", Optional(entry, ZeroOrMore(";", entry)), "}"

# Payloads
def meadow_payload(): return kw("meadow"), meadow_text
def transfer_payload(): return (kw("transfer"), amount, kw("from"), source_account, kw("to"), target_account,
                                Optional(kw("confirmations"), confirmations))
def exclusive_payload(): return kw("exclusive"), kw("from"), source_account, kw("to"), target_account
def budget_payload(): return (kw("budget"), budget_name, Optional(kw("via"), subst_name, ZeroOrMore(",", subst_name)),
                              Optional(kw("shortfall"), shortfall_value))
def qitem(): return qname, "=", qvalue, Optional(unit)
def quantity(): return kw("quantity"), "{", qitem, ZeroOrMore(";", qitem), "}"
PAYLOAD = [meadow_payload, transfer_payload, exclusive_payload, budget_payload, opaque]
def body(): return kw("body"), PAYLOAD, Optional(quantity)
def underlying_none(): return kw("none")

# Promise options
def deadline_opt(): return kw("deadline"), deadline_value
def half_life_opt(): return kw("half_life"), half_life_value
def silent_flag(): return kw("silent")
def implied_opt(): return kw("implied"), parent_id
def underlying_opt(): return kw("underlying"), [underlying_none, (PAYLOAD, Optional(quantity))]
def incidental_flag(): return kw("incidental")
def discrepancy_flag(): return kw("discrepancy"), kw("public")
def combined_flag(): return kw("combined")
def internal_flag(): return kw("internal")
def promissory_flag(): return kw("promissory")
def promise_option(): return [deadline_opt, half_life_opt, silent_flag, implied_opt, underlying_opt,
                              incidental_flag, discrepancy_flag, combined_flag, internal_flag]

# Decision options
def role_opt(): return kw("as"), role_name
def trigger_opt(): return kw("trigger"), pattern
def actor_opt(): return kw("actor"), actor_name
def deactivates_opt(): return kw("deactivates"), deactivated_id
def decide_option(): return [role_opt, internal_flag, trigger_opt, promissory_flag, actor_opt, deactivates_opt]

# Timed actions
def promise_action(): return (kw("promise"), Optional(promise_id, ":"), promiser, "->", promisee, scope, body,
                              ZeroOrMore(promise_option))
def offer_action(): return (kw("offer"), offer_id, ":", promiser, "->", promisee, scope, body,
                            ZeroOrMore([deadline_opt, half_life_opt]), kw("condition"), condition_text)
def accept_action(): return kw("accept"), offer_id, kw("by"), acceptor
def decide_action(): return (kw("decide"), Optional(decision_id, ":"), decider, ZeroOrMore(decide_option), body,
                             Optional(jurisdiction))
def event_action(): return kw("event"), event_kind, ZeroOrMore(field)
def observe_binding(): return observed_var, "=", observed_value
def observe_account(): return kw("account"), account_name
def observe_action(): return kw("observe"), [observe_binding, observe_account, fact_text]
def verdict_action(): return (kw("verdict"), verdict_promise, verdict_status, Optional(kw("degree"), degree_value),
                              Optional(kw("by"), verdict_by))
def tick_action(): return kw("tick")
def action(): return [promise_action, offer_action, accept_action, decide_action, event_action, observe_action,
                      verdict_action, tick_action]

# Conditions and planned actions
def trust_cond(): return kw("trust"), trust_target, cmp_op, threshold
def seen_cond(): return kw("seen"), pattern
def holds_cond(): return kw("holds"), held_promise
def expects_cond(): return kw("expects"), expected_promise
def condition(): return [trust_cond, seen_cond, holds_cond, expects_cond]
def emit_action(): return kw("event"), pattern
def refuse_action(): return kw("refuse"), refused_agent
def plan_action(): return [emit_action, refuse_action]

# Statements
def agents_stmt(): return kw("agents"), agent_name, ZeroOrMore(",", agent_name)
def config_stmt(): return kw("config"), setting_key, setting_value
def reading_stmt(): return kw("reading"), agent_name, semantics_name
def tuplix_stmt(): return (kw("tuplix"), budget_name, Optional(kw("vars"), "{", Optional(var_name, ZeroOrMore(",", var_name)), "}"),
                           entries)
def subst_stmt(): return kw("subst"), subst_name, entries
def account_stmt(): return kw("account"), account_name, entries
def imply_stmt(): return kw("rule"), kw("imply"), rule_name, kw("match"), match_regex, kw("then"), promisee, scope, body
def plan_stmt(): return (kw("rule"), kw("plan"), rule_name, kw("for"), plan_agent, kw("when"), condition,
                         ZeroOrMore(kw("and"), condition), kw("then"), plan_action)
def timed_stmt(): return kw("at"), time_value, action
def statement(): return [agents_stmt, config_stmt, reading_stmt, tuplix_stmt, subst_stmt, account_stmt,
                         imply_stmt, plan_stmt, timed_stmt], EOF


_parser = None


def _get_parser():
    global _parser
    if _parser is None:
        _parser = ParserPython(statement)
    return _parser


def parse_line(text):
    """Parse tree of one statement; raises arpeggio's NoMatch"""
    return _get_parser().parse(text)
