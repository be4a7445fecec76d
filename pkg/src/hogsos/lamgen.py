"""Counting, enumeration and uniform random generation of staged λ-terms
and one-hole λ-contexts."""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass

from .lam import App, Lam, LamTerm, Var, up_to

__all__ = [
    "Hole",
    "count_terms",
    "enumerate_terms",
    "random_term",
    "count_contexts",
    "random_context",
    "plug_lambda",
]


@dataclass(frozen=True, slots=True)
class Hole(LamTerm):
    def __repr__(self) -> str:
        return "Hole()"


@functools.lru_cache(maxsize=None)
def count_terms(size: int, n: int) -> int:
    """Number of well-staged terms with exactly ``size`` nodes at stage ``n``."""
    if size <= 0:
        return 0
    if size == 1:
        return n
    total = count_terms(size - 1, n + 1)
    for a in range(1, size - 1):
        total += count_terms(a, n) * count_terms(size - 1 - a, n)
    return total


def enumerate_terms(max_size: int, n: int = 0) -> list[LamTerm]:
    """All terms of at most ``max_size`` nodes at stage ``n``, smallest first."""

    @functools.lru_cache(maxsize=None)
    def exact(s: int, k: int) -> tuple[LamTerm, ...]:
        if s == 1:
            return tuple(Var(i) for i in range(k))
        out = [Lam(b) for b in exact(s - 1, k + 1)]
        for a in range(1, s - 1):
            out.extend(App(f, x) for f in exact(a, k) for x in exact(s - 1 - a, k))
        return tuple(out)

    return [t for s in range(1, max_size + 1) for t in exact(s, n)]


def random_term(rng: random.Random, size: int, n: int) -> LamTerm:
    """Uniform draw among terms of exactly ``size`` nodes at stage ``n``."""
    total = count_terms(size, n)
    if total == 0:
        raise ValueError(f"no terms of size {size} at stage {n}")
    k = rng.randrange(total)
    if size == 1:
        return Var(k)
    lam = count_terms(size - 1, n + 1)
    if k < lam:
        return Lam(random_term(rng, size - 1, n + 1))
    k -= lam
    for a in range(1, size - 1):
        c = count_terms(a, n) * count_terms(size - 1 - a, n)
        if k < c:
            return App(random_term(rng, a, n), random_term(rng, size - 1 - a, n))
        k -= c
    raise AssertionError("unreachable")


@functools.lru_cache(maxsize=None)
def count_contexts(size: int, n: int) -> int:
    """Number of one-hole contexts with ``size`` nodes (the hole counts as one)."""
    if size <= 0:
        return 0
    if size == 1:
        return 1
    total = count_contexts(size - 1, n + 1)
    for a in range(1, size - 1):
        b = size - 1 - a
        total += count_contexts(a, n) * count_terms(b, n) + count_terms(a, n) * count_contexts(b, n)
    return total


def random_context(rng: random.Random, size: int, n: int = 0) -> LamTerm:
    total = count_contexts(size, n)
    if total == 0:
        raise ValueError(f"no contexts of size {size} at stage {n}")
    k = rng.randrange(total)
    if size == 1:
        return Hole()
    lam = count_contexts(size - 1, n + 1)
    if k < lam:
        return Lam(random_context(rng, size - 1, n + 1))
    k -= lam
    for a in range(1, size - 1):
        b = size - 1 - a
        left = count_contexts(a, n) * count_terms(b, n)
        if k < left:
            return App(random_context(rng, a, n), random_term(rng, b, n))
        k -= left
        right = count_terms(a, n) * count_contexts(b, n)
        if k < right:
            return App(random_term(rng, a, n), random_context(rng, b, n))
        k -= right
    raise AssertionError("unreachable")


def plug_lambda(ctx: LamTerm, p: LamTerm, n: int = 0) -> LamTerm:
    """``ctx[p]`` for a context and a term both at stage ``n``; the hole under
    ``d`` binders receives ``p`` weakened to stage ``n + d``."""

    def go(c: LamTerm, k: int) -> LamTerm:
        if isinstance(c, Hole):
            return up_to(p, n, k)
        if isinstance(c, Lam):
            return Lam(go(c.body, k + 1))
        if isinstance(c, App):
            return App(go(c.fun, k), go(c.arg, k))
        return c

    return go(ctx, n)
