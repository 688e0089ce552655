"""Text syntax for meadow terms and propositions.

    X/(X-1) <= 2 and X != 1
    0 <= X <= 2 sand X in {0, 1/2}
"""
from fractions import Fraction

from arpeggio import EOF, NoMatch, OneOrMore, Optional, ParserPython, PTNodeVisitor, ZeroOrMore, visit_parse_tree
from arpeggio import RegExMatch as _

from .errors import ExpressionSyntaxError
from .meadow import (
    ZERO, Add, AndClassical, AndShortCircuit, BoolConst, Cmp, Const, Div, Inv, Mul, Not, Or,
    SetMember, Sub, Var, is_boolean,
)

KEYWORDS = r"(and|sand|or|not|in|true|false|inv)\b"


def number(): return _(r"\d+")
def rational(): return _(r"[+-]?\d+(/\d+)?")
def variable(): return _(r"(?!" + KEYWORDS + r")[A-Za-z_][A-Za-z0-9_]*")
def inverse(): return _(r"inv\b"), "(", arith, ")"
def primary(): return [number, inverse, variable, ("(", arith, ")")]
def negation(): return "-", factor
def factor(): return [negation, primary]
def mul_op(): return _(r"[*/]")
def term(): return factor, ZeroOrMore(mul_op, factor)
def add_op(): return _(r"[+-]")
def arith(): return term, ZeroOrMore(add_op, term)
def cmp_op(): return _(r"<=|>=|!=|<|>|=")
def comparison(): return arith, OneOrMore(cmp_op, arith)
def rational_set(): return "{", Optional(rational, ZeroOrMore(",", rational)), "}"
def membership(): return arith, _(r"in\b"), rational_set
def truth(): return _(r"(true|false)\b")
def atom(): return [truth, membership, comparison, ("(", disjunction, ")")]
def negated(): return _(r"not\b"), unary
def unary(): return [negated, atom]
def and_op(): return _(r"(sand|and)\b")
def conjunction(): return unary, ZeroOrMore(and_op, unary)
def or_op(): return _(r"or\b")
def disjunction(): return conjunction, ZeroOrMore(or_op, conjunction)
def formula(): return [(disjunction, EOF), (arith, EOF)]


_BINARY = {"+": Add, "-": Sub, "*": Mul, "/": Div, "or": Or, "and": AndClassical, "sand": AndShortCircuit}

_parser = None


def _get_parser():
    global _parser
    if _parser is None:
        _parser = ParserPython(formula)
    return _parser


def _chain(children):
    expr = children[0]
    for op, operand in zip(children[1::2], children[2::2]):
        expr = _BINARY[op](expr, operand)
    return expr


class ExprBuilder(PTNodeVisitor):
    """Turns a parse tree into meadow expression nodes"""

    def visit_number(self, node, children):
        return Const(Fraction(int(node.value)))

    def visit_rational(self, node, children):
        return Fraction(node.value)

    def visit_variable(self, node, children):
        return Var(node.value)

    def visit_truth(self, node, children):
        return BoolConst(node.value == "true")

    def visit_mul_op(self, node, children): return node.value
    def visit_add_op(self, node, children): return node.value
    def visit_cmp_op(self, node, children): return node.value
    def visit_and_op(self, node, children): return node.value
    def visit_or_op(self, node, children): return node.value

    def visit_primary(self, node, children): return children[0]
    def visit_factor(self, node, children): return children[0]
    def visit_atom(self, node, children): return children[0]
    def visit_unary(self, node, children): return children[0]
    def visit_formula(self, node, children): return children[0]

    def visit_inverse(self, node, children):
        return Inv(children.arith[0])

    def visit_negation(self, node, children):
        return Sub(Const(ZERO), children.factor[0])

    def visit_negated(self, node, children):
        return Not(children.unary[0])

    def visit_arith(self, node, children):
        return _chain(children)

    visit_term = visit_conjunction = visit_disjunction = visit_arith

    def visit_comparison(self, node, children):
        pairs = []
        for a, symbol, b in zip(children[0::2], children[1::2], children[2::2]):
            if symbol in (">", ">="):
                a, b, symbol = b, a, symbol.replace(">", "<")
            pairs.append(Cmp(symbol, a, b))
        expr = pairs[0]
        for pair in pairs[1:]:
            expr = AndClassical(expr, pair)
        return expr

    def visit_rational_set(self, node, children):
        return frozenset(children.rational)

    def visit_membership(self, node, children):
        return SetMember(children.arith[0], children.rational_set[0])


def parse_expr(text: str):
    """Parse a term or proposition, raising ExpressionSyntaxError with a column"""
    try:
        tree = _get_parser().parse(text)
    except NoMatch as e:
        raise ExpressionSyntaxError(f"syntax error in {text!r}: {e}", col=e.col) from None
    try:
        return visit_parse_tree(tree, ExprBuilder())
    except ZeroDivisionError:
        raise ExpressionSyntaxError(f"zero denominator in set literal of {text!r}") from None


def parse_proposition(text: str):
    expr = parse_expr(text)
    if not is_boolean(expr):
        raise ExpressionSyntaxError(f"expected a proposition, got a term: {text!r}")
    return expr


def parse_term(text: str):
    expr = parse_expr(text)
    if is_boolean(expr):
        raise ExpressionSyntaxError(f"expected a term, got a proposition: {text!r}")
    return expr
