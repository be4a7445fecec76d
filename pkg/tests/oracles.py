"""Independent reference implementations used as test oracles.

Nothing here imports the substitution or game code under test.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from hogsos.lam import App, Lam, Var
from hogsos.lamgen import count_terms, random_term


# -- named λ-terms with capture-avoiding substitution ---------------------------

@dataclass(frozen=True)
class NVar:
    name: str


@dataclass(frozen=True)
class NLam:
    name: str
    body: object


@dataclass(frozen=True)
class NApp:
    fun: object
    arg: object


def to_named(t, n: int):
    """Levels to names. Free variable ``i`` is ``vi``; a binder at level ``k``
    is also called ``vk``, so binders in substituents routinely collide with
    free names of other terms."""
    if isinstance(t, Var):
        return NVar(f"v{t.i}")
    if isinstance(t, Lam):
        return NLam(f"v{n}", to_named(t.body, n + 1))
    return NApp(to_named(t.fun, n), to_named(t.arg, n))


def free_names(t) -> set:
    if isinstance(t, NVar):
        return {t.name}
    if isinstance(t, NLam):
        return free_names(t.body) - {t.name}
    return free_names(t.fun) | free_names(t.arg)


_fresh = itertools.count()


def named_subst(t, sigma: dict):
    """Textbook capture-avoiding simultaneous substitution."""
    if isinstance(t, NVar):
        return sigma.get(t.name, t)
    if isinstance(t, NApp):
        return NApp(named_subst(t.fun, sigma), named_subst(t.arg, sigma))
    inner = {k: v for k, v in sigma.items() if k != t.name}
    danger = set().union(*(free_names(v) for v in inner.values())) if inner else set()
    if t.name in danger:
        z = f"z{next(_fresh)}"
        return NLam(z, named_subst(t.body, {**inner, t.name: NVar(z)}))
    return NLam(t.name, named_subst(t.body, inner))


def from_named(t, n: int):
    """Names back to levels where a binder's level is its binding depth."""

    def go(s, env, depth):
        if isinstance(s, NVar):
            if s.name in env:
                return Var(env[s.name])
            i = int(s.name[1:])
            assert i < n, f"free variable {s.name} escapes stage {n}"
            return Var(i)
        if isinstance(s, NLam):
            return Lam(go(s.body, {**env, s.name: n + depth}, depth + 1))
        return App(go(s.fun, env, depth), go(s.arg, env, depth))

    return go(t, {}, 0)


def oracle_subst(t, us, m: int):
    """``t`` at stage ``len(us)``, substituents at stage ``m``; result at stage ``m``.

    The substitution is done on names. Free names of ``t`` are renamed apart
    first (``t`` and the ``us`` use overlapping ``v`` names for different
    things) and then mapped to the substituents.
    """
    n = len(us)
    named_t = to_named(t, n)
    # free vi of t means "slot i"; rename slots to s-names so they cannot
    # clash with the v-names free in the substituents.
    slots = named_subst(named_t, {f"v{i}": NVar(f"s{i}") for i in range(n)})
    out = named_subst(slots, {f"s{i}": to_named(u, m) for i, u in enumerate(us)})
    return from_named(out, m)


def random_lambda_corpus(count: int, seed: int, max_size: int = 20, max_stage: int = 3):
    """``count`` (term, stage) pairs, uniform per (size, stage) draw."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(0, max_stage)
        s = rng.randint(1, max_size)
        if count_terms(s, n) == 0:
            continue
        out.append((random_term(rng, s, n), n))
    return out


# -- naive exhaustive bisimulation game -----------------------------------------

def naive_game(model, probes, t1, t2, depth: int) -> bool:
    """Plain recursive game without memo, visited set, or equality shortcut."""
    from hogsos.engine import Fun, Reduce

    b1, b2 = model.step(t1), model.step(t2)
    if type(b1) is not type(b2):
        return False
    if depth == 0:
        return True
    if isinstance(b1, Reduce):
        return naive_game(model, probes, b1.term, b2.term, depth - 1)
    assert isinstance(b1, Fun)
    return all(naive_game(model, probes, model.apply(b1, e), model.apply(b2, e), depth - 1) for e in probes)


def naive_appgame(t1, t2, style, probes, depth: int) -> bool:
    """Strong applicative game straight from the definition, on closed terms."""
    from hogsos import lam as L

    b1, b2 = L.step(t1, 0, style), L.step(t2, 0, style)
    r1, r2 = isinstance(b1, L.Reduce), isinstance(b2, L.Reduce)
    f1, f2 = isinstance(t1, Lam), isinstance(t2, Lam)
    if r1 != r2 or f1 != f2:
        return False
    if depth == 0:
        return True
    if r1:
        return naive_appgame(b1.term, b2.term, style, probes, depth - 1)
    if f1:
        return all(naive_appgame(L.subst1(t1.body, e, 0), L.subst1(t2.body, e, 0), style, probes, depth - 1)
                   for e in probes)
    return True
