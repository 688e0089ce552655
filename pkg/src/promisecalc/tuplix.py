"""Tuplix budgets: labelled meadow terms over declared free variables.

A tuplix with free variables is an open budget; substitutions narrow it
step by step, and a fully closed tuplix predicts a net result that a
final account can be checked against.

Budget files hold one entry per line::

    # event Q
    vars: f, n, c, v
    income: f*n
    venue: -v
    catering: -(c*n)
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Optional

from .errors import BudgetError, ExpressionSyntaxError
from .expr import parse_term
from .meadow import (
    Const, Var, ZERO, children, eval_arith, fold_constants, free_vars, rational_grid, render,
    substitute,
)
from .log import Logger

DEFAULT_INSTANCE_BOUND = 64
SEARCH_BUDGET = 200_000
SAMPLE_POINTS = (Fraction(-2), Fraction(0), Fraction(1), Fraction(3), Fraction(7, 2))
MAX_SAMPLES = 64

log = Logger("Tuplix")


@dataclass(frozen=True)
class Tuplix:
    entries: Mapping[str, object]
    free_vars: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "free_vars", frozenset(self.free_vars))
        for label, expr in self.entries.items():
            stray = free_vars(expr) - self.free_vars
            if stray:
                raise BudgetError(f"entry {label} uses undeclared variables {', '.join(sorted(stray))}")

    @property
    def labels(self) -> frozenset:
        return frozenset(self.entries)

    @property
    def closed(self) -> bool:
        return not any(free_vars(e) for e in self.entries.values())

    def describe(self) -> dict:
        return {label: render(expr) for label, expr in sorted(self.entries.items())}


@dataclass(frozen=True)
class Account:
    entries: Mapping[str, Fraction]

    @property
    def labels(self) -> frozenset:
        return frozenset(self.entries)

    def as_tuplix(self) -> Tuplix:
        return Tuplix({label: Const(Fraction(v)) for label, v in self.entries.items()})


@dataclass(frozen=True)
class Substitution:
    bindings: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        _check_acyclic(self.bindings)

    def resolved(self) -> dict:
        """Bindings with every bound variable expanded away"""
        current = dict(self.bindings)
        for _ in range(len(current) + 1):
            expanded = {v: substitute(e, current) for v, e in current.items()}
            if expanded == current:
                break
            current = expanded
        return current

    def describe(self) -> dict:
        return {v: render(e) for v, e in sorted(self.bindings.items())}


def _check_acyclic(bindings):
    depends = {v: free_vars(e) & set(bindings) for v, e in bindings.items()}
    done, active = set(), set()

    def visit(v):
        if v in done:
            return
        if v in active:
            raise BudgetError(f"cyclic substitution through {v}")
        active.add(v)
        for w in sorted(depends[v]):
            visit(w)
        active.discard(v)
        done.add(v)

    for v in sorted(bindings):
        visit(v)


def compose(outer: Substitution, inner: Substitution) -> Substitution:
    """The substitution that applies `inner` first and then `outer`"""
    outer_resolved = outer.resolved()
    combined = {v: substitute(e, outer_resolved) for v, e in inner.resolved().items()}
    for v, e in outer.bindings.items():
        combined.setdefault(v, e)
    return Substitution(combined)


def instantiate(t: Tuplix, sigma: Substitution) -> Tuplix:
    undeclared = set(sigma.bindings) - t.free_vars
    if undeclared:
        raise BudgetError(f"substitution binds undeclared variables {', '.join(sorted(undeclared))}")
    resolved = sigma.resolved()
    bound = set(resolved)
    entries = {}
    for label, expr in t.entries.items():
        if free_vars(expr) & bound:
            expr = fold_constants(substitute(expr, resolved))
        entries[label] = expr
    remaining = t.free_vars - bound
    for label, expr in entries.items():
        stray = free_vars(expr) - remaining
        if stray:
            raise BudgetError(f"substitution introduces undeclared variables {', '.join(sorted(stray))} in {label}")
    return Tuplix(entries, remaining)


def net_result(t) -> Fraction:
    if isinstance(t, Account):
        return sum(t.entries.values(), ZERO)
    if not t.closed:
        raise BudgetError("net result of an open budget")
    return sum((eval_arith(e, {}) for e in t.entries.values()), ZERO)


def conforms(account: Account, budget: Tuplix, shortfall: Fraction) -> bool:
    if shortfall < 0:
        raise BudgetError("shortfall must not be negative")
    if account.labels != budget.labels:
        raise BudgetError("account and budget have different labels")
    if not budget.closed:
        raise BudgetError("conformance needs a closed budget")
    return net_result(account) >= net_result(budget) - shortfall


class _InstanceSearch:
    """Look for a substitution sigma with sigma(general) equal to specific.

    Entries that are a bare variable or linear in a single unresolved variable
    against a closed target are solved directly. Otherwise structural matching
    is tried first and grid branching second. Every candidate is verified by
    evaluating both sides on sample points; the search gives up (False) when
    its evaluation budget runs out.
    """

    def __init__(self, specific: Tuplix, general: Tuplix, bound: int):
        labels = sorted(general.labels)
        self.pairs = [(general.entries[l], specific.entries[l]) for l in labels]
        self.unknowns = general.free_vars
        self.specific_vars = sorted(specific.free_vars)
        self.grid = rational_grid(bound)
        self.budget = SEARCH_BUDGET
        self.samples = self._sample_environments()

    def _sample_environments(self):
        if not self.specific_vars:
            return [{}]
        combos = product(SAMPLE_POINTS, repeat=len(self.specific_vars))
        if len(SAMPLE_POINTS) ** len(self.specific_vars) <= MAX_SAMPLES:
            return [dict(zip(self.specific_vars, c)) for c in combos]
        rng = random.Random(0)
        return [{v: rng.choice(SAMPLE_POINTS) for v in self.specific_vars} for _ in range(MAX_SAMPLES)]

    def _equal(self, a, b) -> bool:
        self.budget -= len(self.samples)
        return all(eval_arith(a, env) == eval_arith(b, env) for env in self.samples)

    def _open(self, expr, sigma):
        return (free_vars(expr) & self.unknowns) - set(sigma)

    def _propagate(self, sigma):
        changed = True
        while changed:
            changed = False
            for pattern, target in self.pairs:
                current = substitute(pattern, sigma)
                unresolved = self._open(pattern, sigma)
                if not unresolved:
                    if not self._equal(current, target):
                        return None
                    continue
                if isinstance(current, Var):
                    sigma = {**sigma, current.name: target}
                    changed = True
                    continue
                if len(unresolved) == 1 and not free_vars(target):
                    (var,) = unresolved
                    solved = self._solve_linear(current, var, target)
                    if solved is False:
                        return None
                    if solved is not None:
                        sigma = {**sigma, var: Const(solved)}
                        changed = True
        return sigma

    def _solve_linear(self, expr, var, target):
        """Solution of expr(var) = target when expr is linear in var.

        None when expr does not look linear, False when it is constant and
        differs from the target."""
        others = free_vars(expr) - {var}
        if others:
            return None
        at = [eval_arith(expr, {var: Fraction(x)}) for x in range(4)]
        slope = at[1] - at[0]
        if any(at[x] != at[0] + slope * x for x in range(4)):
            return None
        goal = eval_arith(target, {})
        if slope == 0:
            return None if at[0] == goal else False
        return (goal - at[0]) / slope

    def _unify(self, pattern, target, sigma):
        if isinstance(pattern, Var) and pattern.name in self.unknowns:
            bound = sigma.get(pattern.name)
            if bound is None:
                return {**sigma, pattern.name: target}
            return sigma if bound == target else None
        if isinstance(pattern, (Const, Var)):
            return sigma if pattern == target else None
        if type(pattern) is not type(target):
            return None
        for p, t in zip(children(pattern), children(target)):
            sigma = self._unify(p, t, sigma)
            if sigma is None:
                return None
        return sigma

    def _structural(self, sigma):
        for pattern, target in self.pairs:
            if self._open(pattern, sigma):
                sigma = self._unify(pattern, target, sigma)
                if sigma is None:
                    return None
        return sigma

    def search(self, sigma=None):
        if self.budget <= 0:
            return None
        sigma = self._propagate(dict(sigma or {}))
        if sigma is None:
            return None
        open_vars = set()
        for pattern, _ in self.pairs:
            open_vars |= self._open(pattern, sigma)
        if not open_vars:
            return sigma
        guess = self._structural(sigma)
        if guess is not None and guess != sigma:
            found = self.search(guess)
            if found is not None:
                return found
        var = sorted(open_vars)[0]
        for value in self.grid:
            if self.budget <= 0:
                log.debug("instance search budget exhausted on %s", var)
                return None
            self.budget -= 1
            found = self.search({**sigma, var: Const(value)})
            if found is not None:
                return found
        return None


def find_instance(specific: Tuplix, general: Tuplix, bound: int = DEFAULT_INSTANCE_BOUND) -> Optional[dict]:
    if specific.labels != general.labels:
        raise BudgetError("tuplices have different labels")
    return _InstanceSearch(specific, general, bound).search()


def is_instance_of(specific: Tuplix, general: Tuplix, bound: int = DEFAULT_INSTANCE_BOUND) -> bool:
    """True when some substitution turns `general` into `specific`"""
    return find_instance(specific, general, bound) is not None


_ENTRY = re.compile(r"^\s*([A-Za-z_][\w-]*)\s*:\s*(.+?)\s*$")


def parse_tuplix(text: str) -> Tuplix:
    declared = set()
    entries = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _ENTRY.match(line)
        if not match:
            raise BudgetError(f"line {number}: expected 'label: term'")
        label, body = match.groups()
        if label == "vars":
            declared |= {v.strip() for v in body.split(",") if v.strip()}
            continue
        if label in entries:
            raise BudgetError(f"line {number}: duplicate label {label}")
        try:
            entries[label] = parse_term(body)
        except ExpressionSyntaxError as e:
            raise BudgetError(f"line {number}: {e}") from None
    return Tuplix(entries, frozenset(declared))


def parse_account(text: str) -> Account:
    t = parse_tuplix(text)
    if t.free_vars:
        raise BudgetError("an account cannot declare variables")
    return Account({label: eval_arith(e, {}) for label, e in t.entries.items()})


def parse_substitution(text: str) -> Substitution:
    """``f=40, c=25`` style bindings"""
    bindings = {}
    for part in text.split(","):
        if not part.strip():
            continue
        name, sep, body = part.partition("=")
        if not sep or not name.strip():
            raise BudgetError(f"expected 'var=term', got {part.strip()!r}")
        try:
            bindings[name.strip()] = parse_term(body)
        except ExpressionSyntaxError as e:
            raise BudgetError(str(e)) from None
    return Substitution(bindings)
