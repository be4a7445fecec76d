"""First-order terms over an algebraic signature.

Terms are immutable and compared/hashed by structure, so they can be used
directly as keys in memo tables. ``Meta`` leaves stand for metavariables
(rule variables, one-hole-context holes, or tagged generators of a free
algebra); a term without them is closed.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterator, Mapping

__all__ = [
    "OpDecl",
    "Signature",
    "Term",
    "Op",
    "Meta",
    "Context",
    "HOLE",
    "ParseError",
    "SignatureError",
    "UnboundMetaError",
    "parse_term",
    "print_term",
    "plug",
    "subst_meta",
    "metas",
    "enumerate_closed",
    "term_key",
]


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


class SignatureError(ValueError):
    pass


class UnboundMetaError(KeyError):
    pass


@dataclass(frozen=True)
class OpDecl:
    name: str
    arity: int
    infix: bool = False


@dataclass(frozen=True)
class Signature:
    ops: tuple[OpDecl, ...]
    name: str = ""
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        index = {}
        for i, op in enumerate(self.ops):
            if op.arity < 0:
                raise SignatureError(f"negative arity for {op.name!r}")
            if op.name in index:
                raise SignatureError(f"duplicate operation {op.name!r}")
            index[op.name] = i
        infix = [op for op in self.ops if op.infix]
        if len(infix) > 1:
            raise SignatureError("at most one infix (juxtaposition) symbol")
        if infix and infix[0].arity != 2:
            raise SignatureError("the infix symbol must be binary")
        object.__setattr__(self, "_index", index)

    @classmethod
    def of(cls, *decls, name: str = "") -> "Signature":
        """Build from ``(name, arity)`` or ``(name, arity, infix)`` tuples."""
        return cls(tuple(d if isinstance(d, OpDecl) else OpDecl(*d) for d in decls), name)

    def __contains__(self, sym: str) -> bool:
        return sym in self._index

    def arity(self, sym: str) -> int:
        return self.ops[self._index[sym]].arity

    def order(self, sym: str) -> int:
        return self._index[sym]

    @property
    def infix(self) -> str | None:
        for op in self.ops:
            if op.infix:
                return op.name
        return None

    @property
    def constants(self) -> list[str]:
        return [op.name for op in self.ops if op.arity == 0]

    def extend(self, *decls) -> "Signature":
        extra = tuple(d if isinstance(d, OpDecl) else OpDecl(*d) for d in decls)
        return Signature(self.ops + extra, self.name)


class Term:
    """Base class of first-order terms."""

    __slots__ = ()

    @property
    def size(self) -> int:
        raise NotImplementedError

    @property
    def closed(self) -> bool:
        raise NotImplementedError


class Op(Term):
    """``sym(args...)``. Size, closedness and the structural hash are computed
    once at construction, since bisimulation search hashes terms constantly."""

    __slots__ = ("sym", "args", "size", "closed", "_hash")

    def __init__(self, sym: str, args: tuple[Term, ...] = ()):
        if type(args) is not tuple:
            args = tuple(args)
        size = 1
        closed = True
        for a in args:
            size += a.size
            if not a.closed:
                closed = False
        put = object.__setattr__
        put(self, "sym", sym)
        put(self, "args", args)
        put(self, "size", size)
        put(self, "closed", closed)
        put(self, "_hash", hash((sym, args)))

    def __setattr__(self, name, value):
        raise AttributeError("Op is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Op):
            return NotImplemented
        return self._hash == other._hash and self.sym == other.sym and self.args == other.args

    def __reduce__(self):
        return (Op, (self.sym, self.args))

    def __repr__(self) -> str:
        if not self.args:
            return self.sym
        return f"{self.sym}({', '.join(map(repr, self.args))})"


@dataclass(frozen=True, slots=True)
class Meta(Term):
    name: Hashable

    @property
    def size(self) -> int:
        return 1

    @property
    def closed(self) -> bool:
        return False

    def __repr__(self) -> str:
        return f"?{self.name}"


HOLE = "x"


@dataclass(frozen=True)
class Context:
    """A term over ``{x}`` with exactly one occurrence of the hole ``x``."""

    term: Term

    def __post_init__(self):
        holes = [m for m in metas(self.term, with_repeats=True)]
        if holes != [HOLE]:
            raise ValueError(f"a context needs exactly one hole {HOLE!r}, found {holes}")

    @property
    def size(self) -> int:
        return self.term.size

    def __repr__(self) -> str:
        return f"Context({self.term!r})"


def metas(t: Term, with_repeats: bool = False) -> list:
    """Metavariable names of ``t`` in left-to-right order."""
    out: list = []
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Meta):
            out.append(s.name)
        else:
            stack.extend(reversed(s.args))
    if with_repeats:
        return out
    return list(dict.fromkeys(out))


def subst_meta(t: Term, env: Mapping[Hashable, Term] | Callable[[Hashable], Term]) -> Term:
    """Replace every ``Meta`` leaf of ``t`` homomorphically.

    ``env`` is a mapping or a callable; a missing binding raises
    :class:`UnboundMetaError`.
    """
    if callable(env) and not isinstance(env, Mapping):
        lookup = env
    else:
        def lookup(name):
            try:
                return env[name]
            except KeyError:
                raise UnboundMetaError(name) from None

    def go(s: Term) -> Term:
        if isinstance(s, Meta):
            return lookup(s.name)
        if not s.args:
            return s
        return Op(s.sym, tuple(go(a) for a in s.args))

    return go(t)


def plug(c: Context, t: Term) -> Term:
    return subst_meta(c.term, {HOLE: t})


# -- concrete syntax ---------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<sym>[A-Za-z_][A-Za-z0-9_']*(?:\^[A-Za-z0-9_]+)?)|(?P<punct>[(),]))")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos >= len(src):
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        kind = "sym" if m.group("sym") else "punct"
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("eof", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str, sig: Signature, resolve_meta):
        self.toks = _tokenize(src)
        self.i = 0
        self.sig = sig
        self.resolve_meta = resolve_meta

    def peek(self):
        return self.toks[self.i]

    def take(self, text=None):
        tok = self.toks[self.i]
        if text is not None and tok[1] != text:
            raise ParseError(f"expected {text!r}, got {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def starts_atom(self) -> bool:
        kind, text, _ = self.peek()
        return kind == "sym" or text == "("

    def term(self) -> Term:
        t = self.atom()
        while self.starts_atom():
            pos = self.peek()[2]
            infix = self.sig.infix
            if infix is None:
                raise ParseError("juxtaposition needs an infix symbol in the signature", pos)
            t = Op(infix, (t, self.atom()))
        return t

    def atom(self) -> Term:
        kind, text, pos = self.peek()
        if text == "(":
            self.take("(")
            t = self.term()
            self.take(")")
            return t
        if kind != "sym":
            raise ParseError(f"unexpected {text or 'end of input'!r}", pos)
        self.take()
        if text not in self.sig:
            if self.resolve_meta is not None:
                name = self.resolve_meta(text)
                if name is not None:
                    return Meta(name)
            raise ParseError(f"unknown symbol {text!r}", pos)
        arity = self.sig.arity(text)
        if arity == 0:
            return Op(text)
        if self.peek()[1] != "(":
            raise ParseError(f"arity mismatch: {text!r} expects {arity} argument(s)", pos)
        self.take("(")
        args = [self.term()]
        while self.peek()[1] == ",":
            self.take(",")
            args.append(self.term())
        self.take(")")
        if len(args) != arity:
            raise ParseError(
                f"arity mismatch: {text!r} expects {arity} argument(s), got {len(args)}", pos
            )
        return Op(text, tuple(args))


def parse_term(src: str, sig: Signature, resolve_meta: Callable[[str], Hashable | None] | None = None) -> Term:
    """Parse ``src`` against ``sig``; juxtaposition associates to the left.

    Unknown identifiers are errors unless ``resolve_meta`` maps them to a
    metavariable name.
    """
    p = _Parser(src, sig, resolve_meta)
    t = p.term()
    kind, text, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {text!r}", pos)
    return t


def print_term(t: Term, sig: Signature | None = None, meta_name: Callable[[Hashable], str] = str) -> str:
    infix = sig.infix if sig is not None else None

    def go(s: Term, right_of_app: bool = False) -> str:
        if isinstance(s, Meta):
            return meta_name(s.name)
        if s.sym == infix:
            text = f"{go(s.args[0])} {go(s.args[1], True)}"
            return f"({text})" if right_of_app else text
        if not s.args:
            return s.sym
        return f"{s.sym}({', '.join(go(a) for a in s.args)})"

    return go(t)


# -- canonical enumeration ---------------------------------------------------

def term_key(t: Term, sig: Signature) -> tuple:
    """Sort key: size, then head declaration order, then arguments."""
    if isinstance(t, Meta):
        return (1, -1, ())
    return (t.size, sig.order(t.sym), tuple(term_key(a, sig) for a in t.args))


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_closed(sig: Signature, max_size: int) -> list[Term]:
    """All closed terms with at most ``max_size`` nodes, in canonical order."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    if not sig.constants:
        raise SignatureError(f"signature {sig.name!r} has no constants, so no closed terms exist")
    by_size: dict[int, list[Term]] = {}
    for s in range(1, max_size + 1):
        level = []
        for op in sig.ops:
            if op.arity == 0:
                if s == 1:
                    level.append(Op(op.name))
                continue
            for sizes in _compositions(s - 1, op.arity):
                for args in itertools.product(*(by_size[k] for k in sizes)):
                    level.append(Op(op.name, tuple(args)))
        level.sort(key=lambda t: term_key(t, sig))
        by_size[s] = level
    return [t for s in range(1, max_size + 1) for t in by_size[s]]
