"""Staged de Bruijn λ-terms, renamings, substitution, and CBN/CBV steps.

A term at stage ``n`` has free variables ``0 .. n-1``. Internally a binder
at stage ``n`` binds the *newest* variable, index ``n`` (de Bruijn levels),
so the body of ``Lam`` at stage ``n`` lives at stage ``n + 1``. Closed terms
therefore depend on the stage they are read at; :func:`up` moves them.

The concrete syntax (:func:`parse_lambda` / :func:`print_lambda`) uses the
familiar convention instead: inside binders, ``0`` is the innermost bound
variable, and free variable ``i`` is written ``i + depth``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

__all__ = [
    "LamTerm",
    "Var",
    "Lam",
    "App",
    "Renaming",
    "StageError",
    "LambdaSyntaxError",
    "Reduce",
    "Fun",
    "Stuck",
    "LamBehavior",
    "Style",
    "WhnfKind",
    "Whnf",
    "well_staged",
    "rename",
    "up",
    "up_to",
    "swap",
    "contract",
    "subst",
    "subst1",
    "step_cbn",
    "step_cbv",
    "step",
    "whnf_kind",
    "trace_lambda",
    "parse_lambda",
    "print_lambda",
    "size",
    "apps",
    "OMEGA",
]


class StageError(ValueError):
    pass


class LamTerm:
    __slots__ = ()

    def __call__(self, arg: "LamTerm") -> "App":
        return App(self, arg)


@dataclass(frozen=True, slots=True)
class Var(LamTerm):
    i: int

    def __repr__(self) -> str:
        return f"Var({self.i})"


@dataclass(frozen=True, slots=True)
class Lam(LamTerm):
    body: LamTerm

    def __repr__(self) -> str:
        return f"Lam({self.body!r})"


@dataclass(frozen=True, slots=True)
class App(LamTerm):
    fun: LamTerm
    arg: LamTerm

    def __repr__(self) -> str:
        return f"App({self.fun!r}, {self.arg!r})"


def size(t: LamTerm) -> int:
    if isinstance(t, Var):
        return 1
    if isinstance(t, Lam):
        return 1 + size(t.body)
    return 1 + size(t.fun) + size(t.arg)


def apps(head: LamTerm, *args: LamTerm) -> LamTerm:
    for a in args:
        head = App(head, a)
    return head


def well_staged(t: LamTerm, n: int) -> bool:
    if isinstance(t, Var):
        return 0 <= t.i < n
    if isinstance(t, Lam):
        return well_staged(t.body, n + 1)
    return well_staged(t.fun, n) and well_staged(t.arg, n)


def _check(t: LamTerm, n: int, what: str = "term") -> None:
    if n < 0 or not well_staged(t, n):
        raise StageError(f"{what} {t!r} is not well-staged at stage {n}")


# -- renamings -----------------------------------------------------------------

@dataclass(frozen=True)
class Renaming:
    """A function ``source -> target`` between finite cardinals."""

    source: int
    target: int
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.source or any(not 0 <= j < self.target for j in self.table):
            raise StageError(f"bad renaming table {self.table} for {self.source} -> {self.target}")

    @classmethod
    def identity(cls, n: int) -> "Renaming":
        return cls(n, n, tuple(range(n)))

    @classmethod
    def old(cls, n: int) -> "Renaming":
        return cls(n, n + 1, tuple(range(n)))

    def extend(self) -> "Renaming":
        """``r + id_1``: the newest variable goes to the newest variable."""
        return Renaming(self.source + 1, self.target + 1, self.table + (self.target,))

    def then(self, other: "Renaming") -> "Renaming":
        """Composite ``other . self``."""
        if other.source != self.target:
            raise StageError("renamings do not compose")
        return Renaming(self.source, other.target, tuple(other.table[j] for j in self.table))


def _rename(t: LamTerm, table: tuple[int, ...], target: int) -> LamTerm:
    if isinstance(t, Var):
        return Var(table[t.i])
    if isinstance(t, Lam):
        return Lam(_rename(t.body, table + (target,), target + 1))
    return App(_rename(t.fun, table, target), _rename(t.arg, table, target))


def rename(t: LamTerm, r: Renaming) -> LamTerm:
    _check(t, r.source)
    return _rename(t, r.table, r.target)


def up(t: LamTerm, n: int) -> LamTerm:
    """Weakening: stage ``n`` to ``n + 1`` along ``old_n``."""
    return rename(t, Renaming.old(n))


def up_to(t: LamTerm, n: int, m: int) -> LamTerm:
    """Weaken from stage ``n`` to stage ``m >= n``."""
    if m < n:
        raise StageError(f"cannot weaken from stage {n} to {m}")
    return rename(t, Renaming(n, m, tuple(range(n))))


def swap(t: LamTerm, n: int) -> LamTerm:
    """Exchange the two newest variables of a term at stage ``n + 2``."""
    if n < 0:
        raise StageError("swap needs a term at stage >= 2")
    return rename(t, Renaming(n + 2, n + 2, tuple(range(n)) + (n + 1, n)))


def contract(t: LamTerm, n: int) -> LamTerm:
    """Identify the two newest variables: stage ``n + 2`` to ``n + 1``."""
    if n < 0:
        raise StageError("contract needs a term at stage >= 2")
    return rename(t, Renaming(n + 2, n + 1, tuple(range(n)) + (n, n)))


# -- substitution --------------------------------------------------------------

def _subst(t: LamTerm, us: tuple[LamTerm, ...], m: int) -> LamTerm:
    if isinstance(t, Var):
        return us[t.i]
    if isinstance(t, Lam):
        lifted = tuple(_rename(u, tuple(range(m)), m + 1) for u in us) + (Var(m),)
        return Lam(_subst(t.body, lifted, m + 1))
    return App(_subst(t.fun, us, m), _subst(t.arg, us, m))


def subst(t: LamTerm, us: Sequence[LamTerm], m: int) -> LamTerm:
    """Simultaneous substitution ``t[us]``: ``t`` at stage ``len(us)``, ``us`` at stage ``m``."""
    us = tuple(us)
    _check(t, len(us))
    for u in us:
        _check(u, m, "substituent")
    return _subst(t, us, m)


def subst1(b: LamTerm, e: LamTerm, n: int) -> LamTerm:
    """Substitute ``e`` (stage ``n``) for the newest variable of ``b`` (stage ``n + 1``)."""
    return subst(b, tuple(Var(i) for i in range(n)) + (e,), n)


# -- behaviour -----------------------------------------------------------------

@dataclass(frozen=True)
class Reduce:
    term: LamTerm


@dataclass(frozen=True)
class Fun:
    """A λ-abstraction at stage ``n`` seen as a function on stage-``n`` terms."""

    body: LamTerm
    n: int

    def __call__(self, e: LamTerm) -> LamTerm:
        return subst1(self.body, e, self.n)


@dataclass(frozen=True)
class Stuck:
    pass


LamBehavior = Reduce | Fun | Stuck


class Style(Enum):
    CBN = "cbn"
    CBV = "cbv"


def _step(t: LamTerm, n: int, cbv: bool) -> LamBehavior:
    if isinstance(t, Var):
        return Stuck()
    if isinstance(t, Lam):
        return Fun(t.body, n)
    b1 = _step(t.fun, n, cbv)
    if isinstance(b1, Reduce):
        return Reduce(App(b1.term, t.arg))
    if isinstance(b1, Stuck):
        return Stuck()
    if cbv:
        b2 = _step(t.arg, n, cbv)
        if isinstance(b2, Reduce):
            return Reduce(App(t.fun, b2.term))
    return Reduce(b1(t.arg))


def step_cbn(t: LamTerm, n: int = 0) -> LamBehavior:
    _check(t, n)
    return _step(t, n, False)


def step_cbv(t: LamTerm, n: int = 0) -> LamBehavior:
    """Call-by-value: a function reduces its argument first, unless it is
    already irreducible (an abstraction or a stuck head-variable term)."""
    _check(t, n)
    return _step(t, n, True)


def step(t: LamTerm, n: int = 0, style: Style | str = Style.CBN) -> LamBehavior:
    return step_cbv(t, n) if Style(style) is Style.CBV else step_cbn(t, n)


class WhnfKind(Enum):
    REDUCIBLE = "reducible"
    ABSTRACTION = "abstraction"
    HEAD_VARIABLE = "head-variable"


@dataclass(frozen=True)
class Whnf:
    kind: WhnfKind
    var: int | None = None
    spine: int | None = None


def whnf_kind(t: LamTerm, n: int = 0) -> Whnf:
    """Syntactic classification, independent of the step functions."""
    _check(t, n)
    if isinstance(t, Lam):
        return Whnf(WhnfKind.ABSTRACTION)
    k = 0
    head = t
    while isinstance(head, App):
        head = head.fun
        k += 1
    if isinstance(head, Var):
        return Whnf(WhnfKind.HEAD_VARIABLE, head.i, k)
    return Whnf(WhnfKind.REDUCIBLE)


def trace_lambda(t: LamTerm, max_steps: int, n: int = 0, style: Style | str = Style.CBN) -> tuple[list[LamTerm], str]:
    """Follow reductions; the tag is ``fun``, ``stuck`` or ``budget``."""
    terms = [t]
    for _ in range(max_steps):
        b = step(terms[-1], n, style)
        if isinstance(b, Fun):
            return terms, "fun"
        if isinstance(b, Stuck):
            return terms, "stuck"
        terms.append(b.term)
    b = step(terms[-1], n, style)
    return terms, "fun" if isinstance(b, Fun) else "stuck" if isinstance(b, Stuck) else "budget"


# -- concrete syntax -----------------------------------------------------------

class LambdaSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_LTOK = re.compile(r"\s*(?:(?P<num>\d+)|(?P<lam>\\|λ)|(?P<p>[().]))")


def parse_lambda(src: str, stage: int = 0) -> LamTerm:
    """Parse ``\\. body`` / juxtaposition / indices into a stage-``stage`` term."""
    toks = []
    pos = 0
    while pos < len(src):
        if src[pos].isspace():
            pos += 1
            continue
        m = _LTOK.match(src, pos)
        if m is None:
            raise LambdaSyntaxError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("eof", "", len(src)))
    i = 0

    def peek():
        return toks[i]

    def take(text=None):
        nonlocal i
        tok = toks[i]
        if text is not None and tok[1] != text:
            raise LambdaSyntaxError(f"expected {text!r}", tok[2])
        i += 1
        return tok

    def term(depth: int) -> LamTerm:
        t = atom(depth)
        while peek()[0] in ("num", "lam") or peek()[1] == "(":
            t = App(t, atom(depth))
        return t

    def atom(depth: int) -> LamTerm:
        kind, text, p = peek()
        if kind == "lam":
            take()
            take(".")
            return Lam(term(depth + 1))
        if text == "(":
            take("(")
            t = term(depth)
            take(")")
            return t
        if kind == "num":
            take()
            k = int(text)
            if k < depth:
                return Var(stage + depth - 1 - k)
            if k - depth < stage:
                return Var(k - depth)
            raise LambdaSyntaxError(f"index {k} out of scope at stage {stage}", p)
        raise LambdaSyntaxError(f"unexpected {text or 'end of input'!r}", p)

    t = term(0)
    if peek()[0] != "eof":
        raise LambdaSyntaxError(f"trailing input {peek()[1]!r}", peek()[2])
    return t


def print_lambda(t: LamTerm, stage: int = 0, lam: str = "\\") -> str:
    def go(s: LamTerm, depth: int, ctx: str) -> str:
        if isinstance(s, Var):
            return str(stage + depth - 1 - s.i if s.i >= stage else s.i + depth)
        if isinstance(s, Lam):
            text = f"{lam}. {go(s.body, depth + 1, 'top')}"
            return text if ctx == "top" else f"({text})"
        if isinstance(s, App):
            text = f"{go(s.fun, depth, 'fun')} {go(s.arg, depth, 'arg')}"
            return f"({text})" if ctx == "arg" else text
        return "[]"  # context hole

    return go(t, 0, "top")


OMEGA = parse_lambda(r"(\. 0 0) (\. 0 0)")
