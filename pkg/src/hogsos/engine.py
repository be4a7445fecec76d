"""Operational model of a rule specification.

The behaviour of a closed term ``f(t1, ..., tn)`` is computed by structural
recursion: compute the behaviours of the arguments, read off the premise
shape ``W`` (the positions that reduce), and fire the rule for ``(f, W)``.
Labelled rules yield a suspended function which is only instantiated when
applied to a concrete label.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .hospec import Arg, FunApp, HORule, HOSpec, Label, Reduct
from .terms import Op, Term

__all__ = [
    "Reduce",
    "Fun",
    "Behaviour",
    "OperationalModel",
    "Trace",
    "model_for",
    "step",
    "step_nd",
    "apply_fun",
    "trace",
]

DEFAULT_CACHE = 2**20


@dataclass(frozen=True)
class Reduce:
    term: Term

    def __repr__(self) -> str:
        return f"Reduce({self.term!r})"


@dataclass(frozen=True)
class Fun:
    """A labelled rule together with the environment it fired in.

    Two ``Fun`` values are equal iff they come from the same rule with the
    same arguments and argument behaviours.
    """

    rule: HORule
    args: tuple[Term, ...]
    behaviours: tuple["Behaviour", ...]
    model: "OperationalModel" = field(compare=False, repr=False, default=None)

    def __call__(self, e: Term) -> Term:
        return self.model.apply(self, e)

    def __repr__(self) -> str:
        return f"Fun[{self.rule.id}]({', '.join(map(repr, self.args))})"


Behaviour = Reduce | Fun


@dataclass(frozen=True)
class Trace:
    terms: tuple[Term, ...]
    terminal: str  # "fun" | "budget"


class OperationalModel:
    """Step function of a validated spec, memoized on structurally hashed terms.

    ``functools.lru_cache`` is internally synchronized, so one model can be
    shared between threads.
    """

    def __init__(self, spec: HOSpec, cache_size: int = DEFAULT_CACHE):
        self.spec = spec
        # Rules indexed by (operator, which arguments reduce), with their
        # conclusions compiled once.
        self._builders = {id(r): self._compile(r.conclusion) for r in spec.rules}
        self._table: dict = {}
        for r in spec.rules:
            mask = tuple(i + 1 in r.W for i in range(r.arity))
            self._table.setdefault((r.op, mask), []).append(r)
        self._table = {k: tuple(v) for k, v in self._table.items()}
        self._step = functools.lru_cache(maxsize=cache_size)(self._step_uncached)
        self._step_nd = functools.lru_cache(maxsize=cache_size)(self._step_nd_uncached)

    def _compile(self, t: Term):
        """Turn a rule conclusion into a builder ``(args, bs, label) -> Term``."""
        if isinstance(t, Op):
            subs = tuple(self._compile(a) for a in t.args)
            sym = t.sym
            if not subs:
                return lambda args, bs, label: t
            if len(subs) == 1:
                (c1,) = subs
                return lambda args, bs, label: Op(sym, (c1(args, bs, label),))
            if len(subs) == 2:
                c1, c2 = subs
                return lambda args, bs, label: Op(sym, (c1(args, bs, label), c2(args, bs, label)))
            return lambda args, bs, label: Op(sym, tuple([c(args, bs, label) for c in subs]))
        mv = t.name
        if isinstance(mv, Arg):
            i = mv.i - 1
            return lambda args, bs, label: args[i]
        if isinstance(mv, Reduct):
            j = mv.j - 1
            return lambda args, bs, label: bs[j].term
        if isinstance(mv, FunApp):
            i = mv.i - 1
            if isinstance(mv.z, Label):
                return lambda args, bs, label: self.apply(bs[i], label)
            k = mv.z.i - 1
            return lambda args, bs, label: self.apply(bs[i], args[k])
        if isinstance(mv, Label):
            return lambda args, bs, label: label
        raise TypeError(f"unexpected metavariable {mv!r}")

    def _instantiate(self, rule: HORule, args: Sequence[Term], bs: Sequence[Behaviour], label: Term | None) -> Term:
        return self._builders[id(rule)](args, bs, label)

    def _fire(self, rule: HORule, args: tuple[Term, ...], bs: tuple[Behaviour, ...]) -> Behaviour:
        if rule.labelled:
            return Fun(rule, args, bs, self)
        return Reduce(self._builders[id(rule)](args, bs, None))

    def _rules(self, sym: str, bs: tuple[Behaviour, ...]) -> tuple[HORule, ...]:
        key = (sym, tuple(type(b) is Reduce for b in bs))
        rules = self._table.get(key)
        if rules is None:
            W = frozenset(i + 1 for i, r in enumerate(key[1]) if r)
            raise LookupError(f"no rule for ({sym}, W={sorted(W)})")
        return rules

    def _step_uncached(self, t: Term) -> Behaviour:
        bs = tuple([self._step(a) for a in t.args])
        rules = self._rules(t.sym, bs)
        if len(rules) != 1:
            raise LookupError(f"{len(rules)} rules for {t.sym}; use step_nd")
        return self._fire(rules[0], t.args, bs)

    def _step_nd_uncached(self, t: Term) -> tuple[Behaviour, ...]:
        out: list[Behaviour] = []
        for bs in itertools.product(*(self._step_nd(a) for a in t.args)):
            for rule in self._rules(t.sym, bs):
                b = self._fire(rule, t.args, bs)
                if b not in out:
                    out.append(b)
        return tuple(out)

    def step(self, t: Term) -> Behaviour:
        if not isinstance(t, Op) or not t.closed:
            raise ValueError(f"step needs a closed term, got {t!r}")
        return self._step(t)

    def step_nd(self, t: Term) -> tuple[Behaviour, ...]:
        if not isinstance(t, Op) or not t.closed:
            raise ValueError(f"step_nd needs a closed term, got {t!r}")
        return self._step_nd(t)

    def apply(self, b: Behaviour, e: Term) -> Term:
        if not isinstance(b, Fun):
            raise TypeError(f"cannot apply a reduction behaviour: {b!r}")
        return self._instantiate(b.rule, b.args, b.behaviours, e)

    def trace(self, t: Term, max_steps: int) -> Trace:
        terms = [t]
        cur = t
        for _ in range(max_steps):
            b = self.step(cur)
            if isinstance(b, Fun):
                return Trace(tuple(terms), "fun")
            cur = b.term
            terms.append(cur)
        terminal = "fun" if isinstance(self.step(cur), Fun) else "budget"
        return Trace(tuple(terms), terminal)

    def cache_clear(self) -> None:
        self._step.cache_clear()
        self._step_nd.cache_clear()


@functools.lru_cache(maxsize=32)
def model_for(spec: HOSpec) -> OperationalModel:
    return OperationalModel(spec)


def step(spec: HOSpec, t: Term) -> Behaviour:
    if not spec.deterministic:
        raise ValueError("step needs a deterministic spec; use step_nd")
    return model_for(spec).step(t)


def step_nd(spec: HOSpec, t: Term) -> tuple[Behaviour, ...]:
    return model_for(spec).step_nd(t)


def apply_fun(b: Behaviour, e: Term) -> Term:
    if not isinstance(b, Fun):
        raise TypeError(f"cannot apply a reduction behaviour: {b!r}")
    return b.model.apply(b, e)


def trace(spec: HOSpec, t: Term, max_steps: int) -> Trace:
    if not spec.deterministic:
        raise ValueError("trace needs a deterministic spec")
    return model_for(spec).trace(t, max_steps)
