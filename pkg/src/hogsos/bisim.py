"""Depth-bounded bisimulation games.

The label and argument quantifiers of bisimilarity range over infinite sets;
here they range over a finite probe set and the game is cut off after a
fixed number of moves. A :class:`NotBisimilar` verdict is therefore
definitive (the witness replays to a concrete clause violation), while
:class:`BisimilarUpTo` is evidence only.

Clause ids follow the coalgebraic characterization: ``3``/``6`` reductions,
``4``/``7`` functions, ``5``/``8`` stuck terms, with ``1`` and ``2`` for
compatibility with renamings and substitutions. Applicative games use
``A1`` to ``A4``.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Protocol, Sequence

from . import lam as L
from .engine import Fun, OperationalModel, Reduce
from .hospec import HOSpec, Kind, HORule
from .terms import Op, Signature, Term, enumerate_closed, print_term
from .lamgen import enumerate_terms

__all__ = [
    "BisimParams",
    "Move",
    "Witness",
    "BisimilarUpTo",
    "NotBisimilar",
    "Verdict",
    "Obs",
    "SpecSystem",
    "NondetSpecSystem",
    "LambdaSystem",
    "bisim_det",
    "bisim_nd",
    "appbisim",
    "open_ext",
    "check_closure",
    "ClosureReport",
    "replay",
    "replay_applicative",
    "ski_probes",
    "lambda_probes",
    "with_opaque_probe",
    "OPAQUE",
]

OPAQUE = "Opaque"


@dataclass(frozen=True)
class BisimParams:
    depth: int = 8
    probes: tuple = ()
    opaque_probe: bool = False
    renaming_samples: int = 8
    subst_samples: int = 16

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be non-negative")

    def fingerprint(self, show=repr) -> str:
        text = "|".join(show(p) for p in self.probes)
        return hashlib.sha256(text.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class Move:
    kind: str  # reduce | apply | subst | rename
    label: Any = None

    def to_json(self, show) -> dict:
        out: dict = {"move": self.kind}
        if self.kind == "apply":
            out["probe"] = show(self.label)
        elif self.kind == "subst":
            out["substitution"] = [show(u) for u in self.label]
        elif self.kind == "rename":
            out["renaming"] = list(self.label)
        return out


@dataclass(frozen=True)
class Witness:
    moves: tuple[Move, ...]
    clause: str
    left: Any
    right: Any
    left_kind: str
    right_kind: str
    rule_ids: tuple[str | None, str | None] = (None, None)


@dataclass(frozen=True)
class BisimilarUpTo:
    depth: int
    fingerprint: str
    explored: int = 0

    bisimilar = True

    def to_json(self, show=str) -> dict:
        return {"verdict": "BisimilarUpTo", "depth": self.depth, "probes": self.fingerprint,
                "explored": self.explored}


@dataclass(frozen=True)
class NotBisimilar:
    witness: Witness
    explored: int = 0

    bisimilar = False

    def to_json(self, show=str) -> dict:
        w = self.witness
        return {
            "verdict": "NotBisimilar",
            "clause": w.clause,
            "witness": [m.to_json(show) for m in w.moves],
            "left": show(w.left),
            "right": show(w.right),
            "left_behaviour": w.left_kind,
            "right_behaviour": w.right_kind,
            "rules": list(w.rule_ids),
        }


Verdict = BisimilarUpTo | NotBisimilar


@dataclass(frozen=True)
class Obs:
    kind: str  # reduce | fun | stuck
    next: Any = None  # successor state for reduce, handle for fun
    rule: str | None = None


class System(Protocol):
    def observe(self, s: Hashable) -> Obs: ...
    def probes(self, s: Hashable) -> Sequence: ...
    def apply(self, handle: Any, probe: Any) -> Hashable: ...
    def subst_moves(self, s1: Hashable, s2: Hashable) -> Iterable[tuple[Any, Hashable, Hashable]]: ...
    def show(self, s: Any) -> str: ...


# -- systems -------------------------------------------------------------------

def _rule_id(b) -> str | None:
    return b.rule.id if isinstance(b, Fun) else None


class SpecSystem:
    """Closed terms of a deterministic spec; states are terms."""

    def __init__(self, model: OperationalModel, probes: Sequence[Term]):
        self.model = model
        self._probes = tuple(probes)

    def observe(self, s: Term) -> Obs:
        b = self.model.step(s)
        if isinstance(b, Reduce):
            return Obs("reduce", b.term)
        return Obs("fun", b, b.rule.id)

    def probes(self, s: Term) -> Sequence[Term]:
        return self._probes

    def apply(self, handle: Fun, probe: Term) -> Term:
        return self.model.apply(handle, probe)

    def subst_moves(self, s1, s2):
        return ()

    def show(self, s: Term) -> str:
        return print_term(s, self.model.spec.sig)


class NondetSpecSystem(SpecSystem):
    def observe_all(self, s: Term) -> list[Obs]:
        out = []
        for b in self.model.step_nd(s):
            if isinstance(b, Reduce):
                out.append(Obs("reduce", b.term))
            else:
                out.append(Obs("fun", b, b.rule.id))
        return out


class LambdaSystem:
    """λ-terms with their stage as states: ``(term, n)``.

    Functions at stage ``n`` are probed with the closed probes weakened to
    ``n`` and with the free variables; open pairs additionally move to every
    closing substitution drawn from the closed probes (at most
    ``subst_samples`` of them).
    """

    def __init__(self, style: L.Style | str, probes: Sequence[L.LamTerm], subst_samples: int = 16):
        self.style = L.Style(style)
        self.closed = tuple(probes)
        self.subst_samples = subst_samples

    def observe(self, s) -> Obs:
        t, n = s
        b = L.step(t, n, self.style)
        if isinstance(b, L.Reduce):
            return Obs("reduce", (b.term, n))
        if isinstance(b, L.Fun):
            return Obs("fun", b)
        return Obs("stuck")

    def probes(self, s) -> list:
        _, n = s
        return [L.up_to(p, 0, n) for p in self.closed] + [L.Var(i) for i in range(n)]

    def apply(self, handle: L.Fun, probe):
        return (handle(probe), handle.n)

    def substitutions(self, n: int) -> list[tuple]:
        return list(itertools.islice(itertools.product(self.closed, repeat=n), self.subst_samples))

    def subst_moves(self, s1, s2):
        (t1, n), (t2, _) = s1, s2
        if n == 0:
            return
        for us in self.substitutions(n):
            yield us, (L.subst(t1, us, 0), 0), (L.subst(t2, us, 0), 0)

    def show(self, s) -> str:
        if isinstance(s, tuple):
            t, n = s
            return L.print_lambda(t, n)
        return L.print_lambda(s, 0)


# -- probes --------------------------------------------------------------------

def with_opaque_probe(spec: HOSpec) -> HOSpec:
    """Extend ``spec`` by an inert constant that only reduces to itself."""
    sig = spec.sig.extend((OPAQUE, 0))
    rule = HORule(OPAQUE, OPAQUE, 0, frozenset(), Kind.UNLABELLED, Op(OPAQUE))
    return HOSpec(sig, spec.rules + (rule,), spec.mode, spec.dropped)


def ski_probes(sig: Signature, probe_size: int, opaque: bool = False) -> tuple[Term, ...]:
    probes = enumerate_closed(sig, probe_size)
    if opaque and not any(p == Op(OPAQUE) for p in probes):
        probes.append(Op(OPAQUE))
    return tuple(probes)


def lambda_probes(probe_size: int) -> tuple[L.LamTerm, ...]:
    """Closed terms of at most ``probe_size`` nodes."""
    return tuple(enumerate_terms(probe_size, 0))


# -- deterministic game --------------------------------------------------------

def _clause(k1: str, k2: str) -> str | None:
    if k1 == k2:
        return None
    return {"reduce": "3", "fun": "4", "stuck": "5"}[k1]


def bisim_det(sys: System, t1, t2, p: BisimParams, cache: dict | None = None) -> Verdict:
    """Bounded game on a deterministic system.

    Equal states are bisimilar outright; a pair already explored with at
    least the current remaining depth (or still on the stack) is accepted.
    Probes are tried in order and the first mismatch ends the game.

    ``cache`` carries the explored pairs of earlier successful games played
    with the same system and parameters; it only ever grows on success.
    """
    visited: dict = {}
    known = cache if cache is not None else {}

    def visit(s1, s2, d: int, path: tuple[Move, ...]) -> Witness | None:
        if s1 == s2:
            return None
        key = (s1, s2)
        if visited.get(key, -1) >= d or known.get(key, -1) >= d:
            return None
        visited[key] = d
        o1, o2 = sys.observe(s1), sys.observe(s2)
        clause = _clause(o1.kind, o2.kind)
        if clause is not None:
            return Witness(path, clause, s1, s2, o1.kind, o2.kind, (o1.rule, o2.rule))
        if d == 0:
            return None
        if o1.kind == "reduce":
            w = visit(o1.next, o2.next, d - 1, path + (Move("reduce"),))
            if w is not None:
                return w
        elif o1.kind == "fun":
            for e in sys.probes(s1):
                w = visit(sys.apply(o1.next, e), sys.apply(o2.next, e), d - 1, path + (Move("apply", e),))
                if w is not None:
                    return w
        for label, a, b in sys.subst_moves(s1, s2):
            w = visit(a, b, d - 1, path + (Move("subst", label),))
            if w is not None:
                return w
        return None

    w = visit(t1, t2, p.depth, ())
    if w is not None:
        return NotBisimilar(w, len(visited))
    if cache is not None:
        for key, d in visited.items():
            if cache.get(key, -1) < d:
                cache[key] = d
    return BisimilarUpTo(p.depth, p.fingerprint(sys.show), len(visited))


def replay(sys: System, t1, t2, w: Witness) -> bool:
    """Re-run the witness moves and confirm the cited clause fails at the end."""
    s1, s2 = t1, t2
    for m in w.moves:
        o1, o2 = sys.observe(s1), sys.observe(s2)
        if m.kind == "reduce":
            if not (o1.kind == o2.kind == "reduce"):
                return False
            s1, s2 = o1.next, o2.next
        elif m.kind == "apply":
            if not (o1.kind == o2.kind == "fun"):
                return False
            s1, s2 = sys.apply(o1.next, m.label), sys.apply(o2.next, m.label)
        elif m.kind == "subst":
            found = [(a, b) for label, a, b in sys.subst_moves(s1, s2) if label == m.label]
            if not found:
                return False
            s1, s2 = found[0]
        else:
            return False
    if (s1, s2) != (w.left, w.right):
        return False
    o1, o2 = sys.observe(s1), sys.observe(s2)
    return _clause(o1.kind, o2.kind) == w.clause


# -- nondeterministic game -----------------------------------------------------

def bisim_nd(sys: NondetSpecSystem, t1, t2, p: BisimParams, cache: dict | None = None) -> Verdict:
    """Bounded forth-and-back game over behaviour sets.

    Every behaviour of one side must be matched by a behaviour of the same
    variant on the other side whose continuations are bisimilar at the
    remaining depth. ``cache`` may be shared between calls with the same
    system and parameters; entries are exact sub-game results.
    """
    memo: dict = cache if cache is not None else {}

    # memo[(s1, s2)] = (deepest depth known to pass, shallowest known to fail);
    # bounded similarity is antitone in the depth, so both bounds transfer.
    def sim(s1, s2, d: int) -> bool:
        if s1 == s2:
            return True
        key = (s1, s2)
        passed, failed = memo.get(key, (-1, None))
        if passed >= d:
            return True
        if failed is not None and failed <= d:
            return False
        ok = _unmatched(s1, s2, d) is None
        passed, failed = memo.get(key, (-1, None))
        if ok:
            memo[key] = (max(passed, d), failed)
        else:
            memo[key] = (passed, d if failed is None else min(failed, d))
        return ok

    def match(b: Obs, c: Obs, d: int) -> bool:
        if b.kind != c.kind:
            return False
        if d == 0:
            return True
        if b.kind == "reduce":
            return sim(b.next, c.next, d - 1)
        return all(sim(sys.apply(b.next, e), sys.apply(c.next, e), d - 1) for e in sys.probes(None))

    def _unmatched(s1, s2, d: int):
        bs, cs = sys.observe_all(s1), sys.observe_all(s2)
        for b in bs:
            if not any(match(b, c, d) for c in cs):
                return ("3" if b.kind == "reduce" else "4", b, "left")
        for c in cs:
            if not any(match(b, c, d) for b in bs):
                return ("6" if c.kind == "reduce" else "7", c, "right")
        return None

    if t1 == t2:
        return BisimilarUpTo(p.depth, p.fingerprint(sys.show), 0)
    miss = _unmatched(t1, t2, p.depth)
    if miss is None:
        return BisimilarUpTo(p.depth, p.fingerprint(sys.show), len(memo))
    clause, member, side = miss
    kinds = {"left": (member.kind, "none"), "right": ("none", member.kind)}[side]
    return NotBisimilar(Witness((), clause, t1, t2, kinds[0], kinds[1], (member.rule, None)), len(memo))


# -- applicative bisimilarity --------------------------------------------------

def appbisim(t1: L.LamTerm, t2: L.LamTerm, style: L.Style | str, p: BisimParams,
             cache: dict | None = None) -> Verdict:
    """Bounded strong applicative bisimulation game on closed terms.

    Reductions must be matched step for step (A1, A3); abstractions must be
    matched by abstractions whose bodies, instantiated at every probe, are
    again related (A2, A4). ``cache`` works as in :func:`bisim_det`.
    """
    style = L.Style(style)
    if not (L.well_staged(t1, 0) and L.well_staged(t2, 0)):
        raise L.StageError("appbisim needs closed terms")
    visited: dict = {}
    known = cache if cache is not None else {}

    def reduct(t):
        b = L.step(t, 0, style)
        return b.term if isinstance(b, L.Reduce) else None

    def visit(a, b, d: int, path: tuple[Move, ...]) -> Witness | None:
        if a == b:
            return None
        if visited.get((a, b), -1) >= d or known.get((a, b), -1) >= d:
            return None
        visited[(a, b)] = d
        ra, rb = reduct(a), reduct(b)
        la, lb = isinstance(a, L.Lam), isinstance(b, L.Lam)
        ka = "reduce" if ra is not None else "fun" if la else "stuck"
        kb = "reduce" if rb is not None else "fun" if lb else "stuck"
        for clause, bad in (("A1", ra is not None and rb is None), ("A3", rb is not None and ra is None),
                            ("A2", la and not lb), ("A4", lb and not la)):
            if bad:
                return Witness(path, clause, a, b, ka, kb)
        if d == 0:
            return None
        if ra is not None:
            return visit(ra, rb, d - 1, path + (Move("reduce"),))
        if la:
            for e in p.probes:
                w = visit(L.subst1(a.body, e, 0), L.subst1(b.body, e, 0), d - 1, path + (Move("apply", e),))
                if w is not None:
                    return w
        return None

    w = visit(t1, t2, p.depth, ())
    if w is not None:
        return NotBisimilar(w, len(visited))
    if cache is not None:
        for key, d in visited.items():
            if cache.get(key, -1) < d:
                cache[key] = d
    return BisimilarUpTo(p.depth, p.fingerprint(lambda t: L.print_lambda(t, 0)), len(visited))


def replay_applicative(t1, t2, style, w: Witness) -> bool:
    style = L.Style(style)
    a, b = t1, t2
    for m in w.moves:
        if m.kind == "subst":
            a, b = L.subst(a, m.label, 0), L.subst(b, m.label, 0)
        elif m.kind == "reduce":
            ba, bb = L.step(a, 0, style), L.step(b, 0, style)
            if not (isinstance(ba, L.Reduce) and isinstance(bb, L.Reduce)):
                return False
            a, b = ba.term, bb.term
        elif m.kind == "apply":
            if not (isinstance(a, L.Lam) and isinstance(b, L.Lam)):
                return False
            a, b = L.subst1(a.body, m.label, 0), L.subst1(b.body, m.label, 0)
    if (a, b) != (w.left, w.right):
        return False
    ra = isinstance(L.step(a, 0, style), L.Reduce)
    rb = isinstance(L.step(b, 0, style), L.Reduce)
    la, lb = isinstance(a, L.Lam), isinstance(b, L.Lam)
    return {"A1": ra and not rb, "A2": la and not lb, "A3": rb and not ra, "A4": lb and not la}[w.clause]


def open_ext(t1: L.LamTerm, t2: L.LamTerm, n: int, style: L.Style | str, p: BisimParams) -> Verdict:
    """Open extension: compare every closing instance ``t[us]`` with ``us`` drawn
    from the probes (all of ``probes ** n``)."""
    if n == 0:
        return appbisim(t1, t2, style, p)
    if not (L.well_staged(t1, n) and L.well_staged(t2, n)):
        raise L.StageError(f"open_ext needs terms at stage {n}")
    explored = 0
    for us in itertools.product(p.probes, repeat=n):
        v = appbisim(L.subst(t1, us, 0), L.subst(t2, us, 0), style, p)
        explored += v.explored
        if not v.bisimilar:
            w = v.witness
            return NotBisimilar(
                Witness((Move("subst", us),) + w.moves, w.clause, w.left, w.right, w.left_kind, w.right_kind),
                explored,
            )
    return BisimilarUpTo(p.depth, p.fingerprint(lambda t: L.print_lambda(t, 0)), explored)


# -- closure conditions --------------------------------------------------------

@dataclass
class ClosureReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def clauses(self) -> set[str]:
        return {v["clause"] for v in self.violations}


def _renamings(n: int, limit: int) -> list[L.Renaming]:
    out = []
    for m in (n, n + 1):
        for table in itertools.product(range(m), repeat=n):
            out.append(L.Renaming(n, m, table))
            if len(out) >= limit:
                return out
    return out


def check_closure(sys: LambdaSystem, R: Sequence[tuple[L.LamTerm, L.LamTerm, int]], p: BisimParams) -> ClosureReport:
    """Check a finite relation sample against the bisimulation clauses.

    Each pair is played as a game (clauses 3 to 8), then renamed along
    sampled renamings (clause 1) and closed by sampled substitutions
    (clause 2); every derived pair must again survive the game.
    """
    report = ClosureReport()

    def game(a, b, m):
        report.checked += 1
        return bisim_det(sys, (a, m), (b, m), p)

    for idx, (t1, t2, n) in enumerate(R):
        v = game(t1, t2, n)
        if not v.bisimilar:
            report.violations.append({"pair": idx, "clause": v.witness.clause, "detail": "behaviour"})
        for r in _renamings(n, p.renaming_samples):
            v = game(L.rename(t1, r), L.rename(t2, r), r.target)
            if not v.bisimilar:
                report.violations.append({"pair": idx, "clause": "1", "detail": f"renaming {r.table}->{r.target}"})
        if n > 0:
            for us in sys.substitutions(n):
                v = game(L.subst(t1, us, 0), L.subst(t2, us, 0), 0)
                if not v.bisimilar:
                    shown = [L.print_lambda(u, 0) for u in us]
                    report.violations.append({"pair": idx, "clause": "2", "detail": f"substitution {shown}"})
    return report
