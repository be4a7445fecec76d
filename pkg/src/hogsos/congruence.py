"""Property-based congruence testing.

For a pair ``(p, q)`` judged bisimilar, every one-hole context ``C`` should
give ``C[p]`` bisimilar to ``C[q]``. Contexts are drawn at random and the
plugged pairs are re-checked with the same bounded game.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import lam as L
from .bisim import BisimParams
from .instances import InstanceBundle
from .lamgen import count_contexts, plug_lambda, random_context
from .terms import HOLE, Context, Meta, Op, Signature, Term, plug, print_term

__all__ = [
    "GAP_NOTE",
    "DEFAULT_SEED",
    "CongruenceReport",
    "count_ski_contexts",
    "gen_context",
    "gen_lambda_context",
    "congruence_test",
]

DEFAULT_SEED = 20240

GAP_NOTE = (
    "Congruence is guaranteed for behavioural equivalence, i.e. the kernel of the "
    "map into the final coalgebra. This harness uses bounded bisimilarity instead: "
    "labels and arguments range over a finite probe set and games stop at a fixed "
    "depth. A counterexample therefore means either an implementation bug or a "
    "bound too small to tell the plugged terms apart while the original pair "
    "passed; re-run with larger depth and probes to separate the two."
)


# -- counting and drawing first-order contexts ---------------------------------

@functools.lru_cache(maxsize=None)
def _count_terms(sig: Signature, size: int) -> int:
    if size <= 0:
        return 0
    total = 0
    for d in sig.ops:
        total += _count_args(sig, d.arity, size - 1)
    return total


@functools.lru_cache(maxsize=None)
def _count_args(sig: Signature, n: int, size: int) -> int:
    """Tuples of ``n`` closed terms with total size ``size``."""
    if n == 0:
        return 1 if size == 0 else 0
    return sum(_count_terms(sig, a) * _count_args(sig, n - 1, size - a) for a in range(1, size + 1))


@functools.lru_cache(maxsize=None)
def _count_hole_args(sig: Signature, n: int, size: int) -> int:
    """Tuples of ``n`` arguments, exactly one of them a context, total size ``size``."""
    if n == 0:
        return 0
    total = 0
    for a in range(1, size + 1):
        total += count_ski_contexts(sig, a) * _count_args(sig, n - 1, size - a)
        total += _count_terms(sig, a) * _count_hole_args(sig, n - 1, size - a)
    return total


@functools.lru_cache(maxsize=None)
def count_ski_contexts(sig: Signature, size: int) -> int:
    """One-hole contexts of exactly ``size`` nodes; the hole counts as a node."""
    if size <= 0:
        return 0
    total = 1 if size == 1 else 0
    for d in sig.ops:
        total += _count_hole_args(sig, d.arity, size - 1)
    return total


def _draw_term(sig: Signature, size: int, rng: random.Random) -> Term:
    k = rng.randrange(_count_terms(sig, size))
    for d in sig.ops:
        c = _count_args(sig, d.arity, size - 1)
        if k < c:
            return Op(d.name, _draw_args(sig, d.arity, size - 1, rng))
        k -= c
    raise AssertionError("unreachable")


def _draw_args(sig: Signature, n: int, size: int, rng: random.Random) -> tuple[Term, ...]:
    if n == 0:
        return ()
    k = rng.randrange(_count_args(sig, n, size))
    for a in range(1, size + 1):
        c = _count_terms(sig, a) * _count_args(sig, n - 1, size - a)
        if k < c:
            return (_draw_term(sig, a, rng),) + _draw_args(sig, n - 1, size - a, rng)
        k -= c
    raise AssertionError("unreachable")


def _draw_hole_args(sig: Signature, n: int, size: int, rng: random.Random) -> tuple[Term, ...]:
    k = rng.randrange(_count_hole_args(sig, n, size))
    for a in range(1, size + 1):
        c = count_ski_contexts(sig, a) * _count_args(sig, n - 1, size - a)
        if k < c:
            return (_draw_context(sig, a, rng),) + _draw_args(sig, n - 1, size - a, rng)
        k -= c
        c = _count_terms(sig, a) * _count_hole_args(sig, n - 1, size - a)
        if k < c:
            return (_draw_term(sig, a, rng),) + _draw_hole_args(sig, n - 1, size - a, rng)
        k -= c
    raise AssertionError("unreachable")


def _draw_context(sig: Signature, size: int, rng: random.Random) -> Term:
    if size == 1:
        return Meta(HOLE)
    k = rng.randrange(count_ski_contexts(sig, size))
    for d in sig.ops:
        c = _count_hole_args(sig, d.arity, size - 1)
        if k < c:
            return Op(d.name, _draw_hole_args(sig, d.arity, size - 1, rng))
        k -= c
    raise AssertionError("unreachable")


def _pick_size(counts: dict[int, int], rng: random.Random) -> int:
    sizes = [s for s, c in counts.items() if c > 0]
    return sizes[rng.randrange(len(sizes))]


def gen_context(sig: Signature, max_size: int, seed: int | random.Random) -> Context:
    """A random one-hole context of at most ``max_size`` nodes.

    The size is drawn uniformly among the sizes that have contexts, then the
    context uniformly among those of that size.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    size = _pick_size({s: count_ski_contexts(sig, s) for s in range(1, max_size + 1)}, rng)
    return Context(_draw_context(sig, size, rng))


def gen_lambda_context(max_size: int, seed: int | random.Random, n: int = 0) -> L.LamTerm:
    """The λ analogue of :func:`gen_context`; contexts may bind around the hole."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    size = _pick_size({s: count_contexts(s, n) for s in range(1, max_size + 1)}, rng)
    return random_context(rng, size, n)


# -- the harness ---------------------------------------------------------------

@dataclass
class CongruenceReport:
    instance: str
    seed: int
    params: dict
    pairs: list[tuple[str, str]] = field(default_factory=list)
    contexts_per_pair: int = 0
    checks: int = 0
    rejected: list[dict] = field(default_factory=list)
    counterexamples: list[dict] = field(default_factory=list)
    note: str = GAP_NOTE

    @property
    def ok(self) -> bool:
        return not self.counterexamples and not self.rejected

    def to_json(self) -> dict:
        return {
            "note": self.note,
            "instance": self.instance,
            "seed": self.seed,
            "params": self.params,
            "pairs": [list(p) for p in self.pairs],
            "contexts_per_pair": self.contexts_per_pair,
            "checks": self.checks,
            "rejected": self.rejected,
            "counterexamples": self.counterexamples,
            "ok": self.ok,
        }


def _contexts(bundle: InstanceBundle, n: int, max_size: int, seed: int) -> list:
    rng = random.Random(seed)
    if bundle.is_lambda:
        return [gen_lambda_context(max_size, rng) for _ in range(n)]
    return [gen_context(bundle.spec.sig, max_size, rng) for _ in range(n)]


def congruence_test(
    bundle: InstanceBundle,
    pairs: Sequence[tuple[Any, Any]],
    n_contexts: int = 200,
    max_context_size: int = 5,
    p: BisimParams | None = None,
    seed: int = DEFAULT_SEED,
) -> CongruenceReport:
    """Plug every pair into the same ``n_contexts`` seeded contexts and re-check.

    Pairs may be given as source text or as parsed terms. A pair that is not
    itself judged bisimilar is listed under ``rejected`` and not plugged.
    """
    p = p or bundle.params()
    show = bundle.show
    if bundle.is_lambda:
        show_ctx = lambda c: L.print_lambda(c, 0)
        plug_in = lambda c, t: plug_lambda(c, t, 0)
    else:
        show_ctx = lambda c: print_term(c.term, bundle.spec.sig, lambda _: "[]")
        plug_in = plug
    parsed = [tuple(bundle.parse(t) if isinstance(t, str) else t for t in pair) for pair in pairs]
    report = CongruenceReport(
        instance=bundle.id,
        seed=seed,
        params={"depth": p.depth, "probes": len(p.probes), "fingerprint": p.fingerprint(show),
                "opaque": p.opaque_probe, "max_context_size": max_context_size},
        pairs=[(show(a), show(b)) for a, b in parsed],
        contexts_per_pair=n_contexts,
    )
    contexts = _contexts(bundle, n_contexts, max_context_size, seed)
    cache: dict = {}
    for idx, (a, b) in enumerate(parsed):
        v = bundle.decide(a, b, p, cache)
        if not v.bisimilar:
            report.rejected.append({"pair": idx, "verdict": v.to_json(show)})
            continue
        for cidx, c in enumerate(contexts):
            report.checks += 1
            v = bundle.decide(plug_in(c, a), plug_in(c, b), p, cache)
            if not v.bisimilar:
                report.counterexamples.append(
                    {"pair": idx, "context": cidx, "shown": show_ctx(c), "verdict": v.to_json(show)}
                )
    return report
