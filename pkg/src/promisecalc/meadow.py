"""Meadow arithmetic over exact rationals, and the propositions built on it.

A meadow is a field equipped with a total inverse where ``inv(0) = 0``.
Propositions compare meadow terms and combine them with classical, short
circuit and Kleene connectives; the same proposition can be read under three
semantics, and the differences between those readings (MVL creep) are what
`detect_mvl_creep` reports.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Optional, Union

from .errors import EvaluationError

ZERO = Fraction(0)
ONE = Fraction(1)

DIVISION_CONVENTION = "division convention 1/0 = 0 applied"
GUARDED_STATUS = "guarded — no creep under short-circuit"

_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def parse_rational(text) -> Fraction:
    """Parse ``p/q`` or an integer, rejecting decimals and zero denominators"""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not _RATIONAL.match(text):
        raise ValueError(f"not a rational: {text!r}")
    try:
        return Fraction(text.replace(" ", ""))
    except ZeroDivisionError:
        raise ValueError(f"zero denominator: {text!r}") from None


def render_rational(value: Fraction) -> str:
    return str(Fraction(value))


def render_set(values: Iterable[Fraction]) -> str:
    return "{" + ", ".join(render_rational(v) for v in sorted(values)) + "}"


def inv(x: Fraction) -> Fraction:
    return ZERO if x == 0 else 1 / Fraction(x)


# Arithmetic terms

@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Add:
    left: "ArithExpr"
    right: "ArithExpr"


@dataclass(frozen=True)
class Sub:
    left: "ArithExpr"
    right: "ArithExpr"


@dataclass(frozen=True)
class Mul:
    left: "ArithExpr"
    right: "ArithExpr"


@dataclass(frozen=True)
class Inv:
    arg: "ArithExpr"


@dataclass(frozen=True)
class Div:
    left: "ArithExpr"
    right: "ArithExpr"


# Propositions

@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Cmp:
    op: str  # one of = != < <=
    left: "ArithExpr"
    right: "ArithExpr"


@dataclass(frozen=True)
class SetMember:
    arg: "ArithExpr"
    values: frozenset


@dataclass(frozen=True)
class Not:
    arg: "BoolExpr"


@dataclass(frozen=True)
class AndClassical:
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class AndShortCircuit:
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class Or:
    left: "BoolExpr"
    right: "BoolExpr"


ArithExpr = Union[Const, Var, Add, Sub, Mul, Inv, Div]
BoolExpr = Union[BoolConst, Cmp, SetMember, Not, AndClassical, AndShortCircuit, Or]
MeadowExpr = Union[ArithExpr, BoolExpr]

ARITH_NODES = (Const, Var, Add, Sub, Mul, Inv, Div)
BOOL_NODES = (BoolConst, Cmp, SetMember, Not, AndClassical, AndShortCircuit, Or)
COMPARISONS = ("=", "!=", "<", "<=")


class Semantics(Enum):
    MEADOW_TOTAL = "total"
    SHORT_CIRCUIT_PARTIAL = "partial"
    THREE_VALUED = "kleene"


class TruthValue(Enum):
    TRUE = "true"
    FALSE = "false"
    UNDEFINED = "undefined"

    @classmethod
    def of(cls, value: bool) -> "TruthValue":
        return cls.TRUE if value else cls.FALSE

    def negate(self) -> "TruthValue":
        if self is TruthValue.UNDEFINED:
            return self
        return TruthValue.of(self is TruthValue.FALSE)

    def kleene_and(self, other: "TruthValue") -> "TruthValue":
        if TruthValue.FALSE in (self, other):
            return TruthValue.FALSE
        if TruthValue.UNDEFINED in (self, other):
            return TruthValue.UNDEFINED
        return TruthValue.TRUE

    def kleene_or(self, other: "TruthValue") -> "TruthValue":
        if TruthValue.TRUE in (self, other):
            return TruthValue.TRUE
        if TruthValue.UNDEFINED in (self, other):
            return TruthValue.UNDEFINED
        return TruthValue.FALSE


def children(expr: MeadowExpr) -> tuple:
    if isinstance(expr, (Const, Var, BoolConst)):
        return ()
    if isinstance(expr, (Inv, Not, SetMember)):
        return (expr.arg,)
    return (expr.left, expr.right)


def free_vars(expr: MeadowExpr) -> frozenset:
    if isinstance(expr, Var):
        return frozenset((expr.name,))
    found = frozenset()
    for child in children(expr):
        found |= free_vars(child)
    return found


def substitute(expr: MeadowExpr, bindings: Mapping[str, ArithExpr]) -> MeadowExpr:
    """Simultaneous single-pass replacement of variables"""
    if isinstance(expr, Var):
        return bindings.get(expr.name, expr)
    if isinstance(expr, (Const, BoolConst)):
        return expr
    if isinstance(expr, (Inv, Not)):
        return type(expr)(substitute(expr.arg, bindings))
    if isinstance(expr, SetMember):
        return SetMember(substitute(expr.arg, bindings), expr.values)
    if isinstance(expr, Cmp):
        return Cmp(expr.op, substitute(expr.left, bindings), substitute(expr.right, bindings))
    return type(expr)(substitute(expr.left, bindings), substitute(expr.right, bindings))


def fold_constants(expr: ArithExpr) -> ArithExpr:
    """Collapse every closed arithmetic subterm into a constant"""
    if isinstance(expr, (Const, Var)):
        return expr
    if not free_vars(expr):
        return Const(eval_arith(expr, {}))
    if isinstance(expr, Inv):
        return Inv(fold_constants(expr.arg))
    return type(expr)(fold_constants(expr.left), fold_constants(expr.right))


class _ZeroDivisor(Exception):
    def __init__(self, term):
        super().__init__(render(term))
        self.term = term


def _arith(expr: ArithExpr, env: Mapping[str, Fraction], partial: bool) -> Fraction:
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        try:
            return Fraction(env[expr.name])
        except KeyError:
            raise EvaluationError(f"unbound variable {expr.name}") from None
    if isinstance(expr, Add):
        return _arith(expr.left, env, partial) + _arith(expr.right, env, partial)
    if isinstance(expr, Sub):
        return _arith(expr.left, env, partial) - _arith(expr.right, env, partial)
    if isinstance(expr, Mul):
        return _arith(expr.left, env, partial) * _arith(expr.right, env, partial)
    if isinstance(expr, Inv):
        divisor = _arith(expr.arg, env, partial)
        if divisor == 0 and partial:
            raise _ZeroDivisor(expr)
        return inv(divisor)
    if isinstance(expr, Div):
        numerator = _arith(expr.left, env, partial)
        divisor = _arith(expr.right, env, partial)
        if divisor == 0 and partial:
            raise _ZeroDivisor(expr)
        return numerator * inv(divisor)
    raise EvaluationError(f"expected an arithmetic term, got {render(expr)}")


def eval_arith(expr: ArithExpr, env: Mapping[str, Fraction]) -> Fraction:
    """Total evaluation: x/0 = 0"""
    return _arith(expr, env, partial=False)


def _compare(op: str, a: Fraction, b: Fraction) -> bool:
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    return a <= b


def _truth(expr: BoolExpr, env, semantics: Semantics) -> TruthValue:
    partial = semantics is not Semantics.MEADOW_TOTAL
    sequential = semantics is Semantics.SHORT_CIRCUIT_PARTIAL

    if isinstance(expr, BoolConst):
        return TruthValue.of(expr.value)
    if isinstance(expr, Cmp):
        try:
            left = _arith(expr.left, env, partial)
            right = _arith(expr.right, env, partial)
        except _ZeroDivisor:
            return TruthValue.UNDEFINED
        return TruthValue.of(_compare(expr.op, left, right))
    if isinstance(expr, SetMember):
        try:
            value = _arith(expr.arg, env, partial)
        except _ZeroDivisor:
            return TruthValue.UNDEFINED
        return TruthValue.of(value in expr.values)
    if isinstance(expr, Not):
        return _truth(expr.arg, env, semantics).negate()
    if isinstance(expr, AndShortCircuit) or (sequential and isinstance(expr, AndClassical)):
        left = _truth(expr.left, env, semantics)
        if left is not TruthValue.TRUE:
            return left
        return _truth(expr.right, env, semantics)
    if isinstance(expr, AndClassical):
        return _truth(expr.left, env, semantics).kleene_and(_truth(expr.right, env, semantics))
    if isinstance(expr, Or):
        left = _truth(expr.left, env, semantics)
        if sequential:
            if left is not TruthValue.FALSE:
                return left
            return _truth(expr.right, env, semantics)
        return left.kleene_or(_truth(expr.right, env, semantics))
    raise EvaluationError(f"expected a proposition, got {render(expr)}")


def eval_bool(expr: BoolExpr, env: Mapping[str, Fraction],
              semantics: Semantics = Semantics.MEADOW_TOTAL) -> TruthValue:
    return _truth(expr, env, semantics)


def is_boolean(expr: MeadowExpr) -> bool:
    return isinstance(expr, BOOL_NODES)


def zero_divisions(expr: MeadowExpr, env: Mapping[str, Fraction]) -> list:
    """Division and inverse subterms whose divisor is zero under `env`"""
    found = []
    if isinstance(expr, (Inv, Div)):
        divisor = expr.arg if isinstance(expr, Inv) else expr.right
        if eval_arith(divisor, env) == 0:
            found.append(expr)
    for child in children(expr):
        found.extend(zero_divisions(child, env))
    return found


# Rendering

_PRECEDENCE = {
    Or: 1, AndClassical: 2, AndShortCircuit: 2, Not: 3, Cmp: 4, SetMember: 4,
    Add: 5, Sub: 5, Mul: 6, Div: 6,
}
_SYMBOLS = {Or: "or", AndClassical: "and", AndShortCircuit: "sand", Add: "+", Sub: "-", Mul: "*"}


def _precedence(expr) -> int:
    if isinstance(expr, Sub) and expr.left == Const(ZERO):
        return 7
    if isinstance(expr, Const) and (expr.value < 0 or expr.value.denominator != 1):
        return 7
    return _PRECEDENCE.get(type(expr), 8)


def _wrap(expr, minimum: int) -> str:
    text = render(expr)
    return f"({text})" if _precedence(expr) < minimum else text


def render(expr: MeadowExpr) -> str:
    if isinstance(expr, Const):
        value = expr.value
        if value >= 0 and value.denominator == 1:
            return str(value)
        return f"({value})"
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, BoolConst):
        return "true" if expr.value else "false"
    if isinstance(expr, Inv):
        return f"inv({render(expr.arg)})"
    if isinstance(expr, Sub) and expr.left == Const(ZERO):
        return "-" + _wrap(expr.right, 7)
    if isinstance(expr, Div):
        return f"{_wrap(expr.left, 6)}/{_wrap(expr.right, 7)}"
    if isinstance(expr, Cmp):
        return f"{render(expr.left)} {expr.op} {render(expr.right)}"
    if isinstance(expr, SetMember):
        return f"{_wrap(expr.arg, 5)} in {render_set(expr.values)}"
    if isinstance(expr, Not):
        return "not " + _wrap(expr.arg, 3)
    level = _PRECEDENCE[type(expr)]
    return f"{_wrap(expr.left, level)} {_SYMBOLS[type(expr)]} {_wrap(expr.right, level + 1)}"


# Enumeration over the rational grid

def rational_grid(bound: int) -> list:
    """Rationals p/q in lowest terms with |p| <= bound and 1 <= q <= bound,
    ordered by height max(|p|, q) and then by value."""
    if bound < 1:
        raise EvaluationError("grid bound must be at least 1")
    points = {
        Fraction(p, q)
        for q in range(1, bound + 1)
        for p in range(-bound, bound + 1)
        if gcd(p, q) == 1
    }
    return sorted(points, key=lambda r: (max(abs(r.numerator), r.denominator), r))


def _single_variable(exprs, var: Optional[str]) -> Optional[str]:
    names = frozenset().union(*(free_vars(e) for e in exprs))
    if var is not None:
        names = names | {var}
    if len(names) > 1:
        raise EvaluationError("expected at most one free variable, found " + ", ".join(sorted(names)))
    return next(iter(names), None)


def _bindings(var: Optional[str], bound: int):
    if var is None:
        return [{}]
    return [{var: value} for value in rational_grid(bound)]


def solution_set(expr: BoolExpr, var: str, bound: int) -> frozenset:
    """Grid values of `var` that satisfy `expr` under meadow semantics"""
    _single_variable([expr], var)
    return frozenset(
        env[var] for env in _bindings(var, bound)
        if eval_bool(expr, env) is TruthValue.TRUE
    )


@dataclass(frozen=True)
class SimplificationReport:
    var: Optional[str]
    bound: int
    original: frozenset
    simplified: frozenset
    counterexamples: tuple

    @property
    def equivalent(self) -> bool:
        return not self.counterexamples


def check_simplification(original: BoolExpr, simplified: BoolExpr, bound: int) -> SimplificationReport:
    var = _single_variable([original, simplified], None)
    if var is None:
        same = eval_bool(original, {}) == eval_bool(simplified, {})
        return SimplificationReport(None, bound, frozenset(), frozenset(), () if same else (ZERO,))
    left = solution_set(original, var, bound)
    right = solution_set(simplified, var, bound)
    return SimplificationReport(var, bound, left, right, tuple(sorted(left ^ right)))


@dataclass(frozen=True)
class CreepFinding:
    binding: Optional[Fraction]
    total: TruthValue
    partial: TruthValue
    kleene: TruthValue
    subterms: tuple
    guarded: bool

    @property
    def differs(self) -> bool:
        return len({self.total, self.partial, self.kleene}) > 1


@dataclass(frozen=True)
class CreepReport:
    var: Optional[str]
    bound: int
    findings: tuple  # every binding that reaches a zero divisor

    @property
    def creep(self) -> tuple:
        return tuple(f for f in self.findings if f.differs)

    @property
    def status(self) -> str:
        if not self.findings:
            return "clean"
        if all(f.guarded for f in self.findings):
            return GUARDED_STATUS
        return "creep"

    def lines(self) -> list:
        out = [f"status: {self.status}"]
        for finding in self.findings:
            where = "" if finding.binding is None else f"{self.var} = {render_rational(finding.binding)}: "
            out.append(
                f"  {where}total {finding.total.value}, partial {finding.partial.value}, "
                f"kleene {finding.kleene.value}; zero divisor {', '.join(finding.subterms)}"
                + ("; suppressed by short-circuit" if finding.guarded else "")
            )
            out.append(f"    warning: {DIVISION_CONVENTION}")
        return out


def detect_mvl_creep(expr: BoolExpr, bound: int) -> CreepReport:
    """Compare the three readings of `expr` wherever a zero divisor is reachable.

    A binding is reported when some division by zero occurs in the term; a
    finding is guarded when short-circuit evaluation still yields a defined
    truth value there. Division-free propositions give an empty report.
    """
    if not is_boolean(expr):
        raise EvaluationError("creep detection needs a proposition")
    var = _single_variable([expr], None)
    findings = []
    for env in _bindings(var, bound):
        zeros = zero_divisions(expr, env)
        if not zeros:
            continue
        partial = eval_bool(expr, env, Semantics.SHORT_CIRCUIT_PARTIAL)
        findings.append(CreepFinding(
            binding=env.get(var) if var else None,
            total=eval_bool(expr, env, Semantics.MEADOW_TOTAL),
            partial=partial,
            kleene=eval_bool(expr, env, Semantics.THREE_VALUED),
            subterms=tuple(dict.fromkeys(render(z) for z in zeros)),
            guarded=partial is not TruthValue.UNDEFINED,
        ))
    return CreepReport(var, bound, tuple(findings))
