"""Exhaustive finite-instance checks of the law induced by a rule spec.

A spec induces a family ``rho_{X,Y}: Sigma(X x B(X,Y)) -> B(X, Sigma*(X+Y))``.
On small sets every input and every morphism can be enumerated, so the
dinaturality hexagon (in ``X``) and the naturality square (in ``Y``) are
checked by evaluating both legs and comparing structurally.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .hospec import (
    FunTable,
    HOSpec,
    LawFun,
    LawInput,
    YVal,
    instantiate_law,
    xgen,
)
from .terms import Meta, Term, print_term, subst_meta

__all__ = [
    "BudgetError",
    "FiniteInstance",
    "LawCounterexample",
    "LawReport",
    "LawSummary",
    "MAX_SET",
    "MAX_ARITY",
    "MAX_CHECKS",
    "check_dinaturality",
    "check_naturality_Y",
    "check_all",
    "dinaturality_instances",
    "naturality_instances",
    "inputs",
    "count_inputs",
    "label_case_mutant",
    "show_result",
]

MAX_SET = 3
MAX_ARITY = 3
MAX_CHECKS = 10**6

Law = Callable[[HOSpec, int, int, LawInput], object]


class BudgetError(ValueError):
    """The requested check exceeds the hard enumeration budget."""


@dataclass(frozen=True)
class FiniteInstance:
    """Sets ``X, X', Y, Y'`` as ranges with ``f: X -> X'`` and ``g: Y -> Y'``."""

    x: int
    x2: int
    y: int
    y2: int
    f: tuple[int, ...]
    g: tuple[int, ...]

    def __post_init__(self):
        if min(self.x, self.x2, self.y, self.y2) < 0:
            raise ValueError("set sizes must be non-negative")
        if len(self.f) != self.x or any(not 0 <= k < self.x2 for k in self.f):
            raise ValueError(f"f={self.f} is not a function table {self.x} -> {self.x2}")
        if len(self.g) != self.y or any(not 0 <= k < self.y2 for k in self.g):
            raise ValueError(f"g={self.g} is not a function table {self.y} -> {self.y2}")

    @classmethod
    def dinatural(cls, x: int, x2: int, y: int, f: tuple[int, ...]) -> "FiniteInstance":
        return cls(x, x2, y, y, tuple(f), tuple(range(y)))

    @classmethod
    def natural(cls, x: int, y: int, y2: int, g: tuple[int, ...]) -> "FiniteInstance":
        return cls(x, x, y, y2, tuple(range(x)), tuple(g))


@dataclass(frozen=True)
class LawCounterexample:
    instance: FiniteInstance
    w: LawInput
    left: object
    right: object


@dataclass
class LawReport:
    check: str
    checked: int = 0
    counterexamples: list[LawCounterexample] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


# -- enumeration -------------------------------------------------------------

def _behaviours(table_dom: int, y: int) -> list[YVal | FunTable]:
    return [YVal(k) for k in range(y)] + [FunTable(t) for t in itertools.product(range(y), repeat=table_dom)]


def count_inputs(spec: HOSpec, x: int, table_dom: int, y: int) -> int:
    per_arg = x * (y + y**table_dom)
    return sum(per_arg**n for n in (d.arity for d in spec.sig.ops))


def inputs(spec: HOSpec, x: int, table_dom: int, y: int) -> Iterator[LawInput]:
    """Every ``op((u1,v1),...,(un,vn))`` with ``ui`` in X and ``vi`` in Y + Y^D."""
    legs = [(u, v) for u in range(x) for v in _behaviours(table_dom, y)]
    for op, n in ((d.name, d.arity) for d in spec.sig.ops):
        for args in itertools.product(legs, repeat=n):
            yield LawInput(op, tuple(args))


def _guard(spec: HOSpec, *sizes: int) -> None:
    if max(sizes, default=0) > MAX_SET:
        raise BudgetError(f"set sizes are capped at {MAX_SET}, got {max(sizes)}")
    arity = max((n for n in (d.arity for d in spec.sig.ops)), default=0)
    if arity > MAX_ARITY:
        raise BudgetError(f"operator arity is capped at {MAX_ARITY}, got {arity}")


def _refuse(total: int) -> None:
    if total > MAX_CHECKS:
        raise BudgetError(f"{total} checks requested, the budget is {MAX_CHECKS}")


# -- functorial actions --------------------------------------------------------

def _map_gens(t: Term, fx=None, gy=None) -> Term:
    def go(name):
        side, k = name
        if side == "X" and fx is not None:
            return Meta(("X", fx[k]))
        if side == "Y" and gy is not None:
            return Meta(("Y", gy[k]))
        return Meta(name)

    return subst_meta(t, go)


def _post(result, fx=None, gy=None):
    """Covariant action on results: rename generators inside terms and tables."""
    if isinstance(result, LawFun):
        return LawFun(tuple(_map_gens(t, fx, gy) for t in result.table))
    return _map_gens(result, fx, gy)


def _pre(result, f):
    """Contravariant action: precompose a result table with ``f``."""
    if isinstance(result, LawFun):
        return LawFun(tuple(result.table[k] for k in f))
    return result


def _lift(spec: HOSpec, result, action):
    if spec.deterministic:
        return action(result)
    return frozenset(action(r) for r in result)


# -- the checks ----------------------------------------------------------------

def check_dinaturality(spec: HOSpec, inst: FiniteInstance, law: Law | None = None) -> LawReport:
    """Hexagon for ``f: X -> X'`` over every ``w`` in Sigma(X x B(X', Y))."""
    law = law or instantiate_law
    _guard(spec, inst.x, inst.x2, inst.y)
    _refuse(count_inputs(spec, inst.x, inst.x2, inst.y))
    f = inst.f
    report = LawReport("dinaturality")
    for w in inputs(spec, inst.x, inst.x2, inst.y):
        along_f = LawInput(w.op, tuple(
            (u, FunTable(tuple(v.table[k] for k in f)) if isinstance(v, FunTable) else v) for u, v in w.args
        ))
        top = _lift(spec, law(spec, inst.x, inst.y, along_f), lambda r: _post(r, fx=f))
        pushed = LawInput(w.op, tuple((f[u], v) for u, v in w.args))
        bottom = _lift(spec, law(spec, inst.x2, inst.y, pushed), lambda r: _pre(r, f))
        report.checked += 1
        if top != bottom:
            report.counterexamples.append(LawCounterexample(inst, w, top, bottom))
    return report


def check_naturality_Y(spec: HOSpec, inst: FiniteInstance, law: Law | None = None) -> LawReport:
    """Square for ``g: Y -> Y'`` over every ``w`` in Sigma(X x B(X, Y))."""
    law = law or instantiate_law
    _guard(spec, inst.x, inst.y, inst.y2)
    _refuse(count_inputs(spec, inst.x, inst.x, inst.y))
    g = inst.g
    report = LawReport("naturality_Y")
    for w in inputs(spec, inst.x, inst.x, inst.y):
        mapped = LawInput(w.op, tuple(
            (u, YVal(g[v.k]) if isinstance(v, YVal) else FunTable(tuple(g[k] for k in v.table)))
            for u, v in w.args
        ))
        first = law(spec, inst.x, inst.y2, mapped)
        second = _lift(spec, law(spec, inst.x, inst.y, w), lambda r: _post(r, gy=g))
        if not spec.deterministic:
            first = frozenset(first)
        report.checked += 1
        if first != second:
            report.counterexamples.append(LawCounterexample(inst, w, first, second))
    return report


def _tables(dom: int, cod: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(cod), repeat=dom))


def dinaturality_instances(max_set: int) -> Iterator[FiniteInstance]:
    for x, x2, y in itertools.product(range(max_set + 1), repeat=3):
        for f in _tables(x, x2):
            yield FiniteInstance.dinatural(x, x2, y, f)


def naturality_instances(max_set: int) -> Iterator[FiniteInstance]:
    for x, y, y2 in itertools.product(range(max_set + 1), repeat=3):
        for g in _tables(y, y2):
            yield FiniteInstance.natural(x, y, y2, g)


@dataclass
class LawSummary:
    max_set: int
    dinaturality: LawReport
    naturality: LawReport
    instances: int

    @property
    def ok(self) -> bool:
        return self.dinaturality.ok and self.naturality.ok

    def to_json(self, spec: HOSpec) -> dict:
        out = {
            "max_set": self.max_set,
            "instances": self.instances,
            "dinaturality": {"checked": self.dinaturality.checked,
                             "counterexamples": len(self.dinaturality.counterexamples)},
            "naturality_Y": {"checked": self.naturality.checked,
                             "counterexamples": len(self.naturality.counterexamples)},
            "ok": self.ok,
        }
        first = (self.dinaturality.counterexamples or self.naturality.counterexamples or [None])[0]
        if first is not None:
            out["first_counterexample"] = _cex_json(spec, first)
        return out


def _cex_json(spec: HOSpec, c: LawCounterexample) -> dict:
    i = c.instance
    return {
        "instance": {"X": i.x, "X'": i.x2, "Y": i.y, "Y'": i.y2, "f": list(i.f), "g": list(i.g)},
        "w": {"op": c.w.op, "args": [[u, v.k if isinstance(v, YVal) else list(v.table)] for u, v in c.w.args]},
        "left": show_result(spec, c.left),
        "right": show_result(spec, c.right),
    }


def show_result(spec: HOSpec, r) -> object:
    name = lambda n: f"{n[0].lower()}{n[1]}"
    if isinstance(r, frozenset):
        return sorted(str(show_result(spec, x)) for x in r)
    if isinstance(r, LawFun):
        return [print_term(t, spec.sig, name) for t in r.table]
    return print_term(r, spec.sig, name)


def check_all(spec: HOSpec, max_set: int = 2, law: Law | None = None) -> LawSummary:
    """Both checks over every instance with all sets of size at most ``max_set``."""
    _guard(spec, max_set)
    dins = list(dinaturality_instances(max_set))
    nats = list(naturality_instances(max_set))
    total = sum(count_inputs(spec, i.x, i.x2, i.y) for i in dins) + sum(
        count_inputs(spec, i.x, i.x, i.y) for i in nats)
    _refuse(total)
    din = LawReport("dinaturality")
    nat = LawReport("naturality_Y")
    for inst in dins:
        r = check_dinaturality(spec, inst, law)
        din.checked += r.checked
        din.counterexamples += r.counterexamples
    for inst in nats:
        r = check_naturality_Y(spec, inst, law)
        nat.checked += r.checked
        nat.counterexamples += r.counterexamples
    return LawSummary(max_set, din, nat, len(dins) + len(nats))


def label_case_mutant(op: str = "S") -> Law:
    """A non-parametric law: the labelled rule of ``op`` returns the label
    itself when the label is the element 0, and behaves normally otherwise.

    No rule of the format can express this, so it is injected at the law
    level, bypassing validation.
    """

    def law(spec: HOSpec, x: int, y: int, w: LawInput):
        r = instantiate_law(spec, x, y, w)
        if w.op == op and isinstance(r, LawFun) and x > 0:
            return LawFun((xgen(0),) + r.table[1:])
        return r

    return law
