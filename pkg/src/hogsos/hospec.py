"""Higher-order rule specifications: data model, parsing, desugaring, validation.

A rule for an ``n``-ary operator ``f`` fixes a premise shape ``W``: the
argument positions in ``W`` reduce (``xj -> yj``), the others behave as
functions and may be applied to the other arguments or, in labelled rules,
to the incoming label (``xi -z-> yi^z``). A specification has exactly one
rule per ``(f, W)`` in deterministic mode and at least one in
nondeterministic mode.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .terms import Meta, Op, ParseError, Signature, OpDecl, Term, metas, parse_term, print_term, subst_meta

__all__ = [
    "Label",
    "Arg",
    "Reduct",
    "FunApp",
    "MetaVar",
    "Kind",
    "Mode",
    "Premise",
    "PartialRule",
    "HORule",
    "HOSpec",
    "Issue",
    "ValidationReport",
    "DesugarError",
    "SpecSyntaxError",
    "LawInputError",
    "YVal",
    "FunTable",
    "LawFun",
    "LawInput",
    "xgen",
    "ygen",
    "parse_spec",
    "load_spec",
    "desugar",
    "validate",
    "scope_violations",
    "instantiate_law",
    "format_rule",
]


# -- metavariables -------------------------------------------------------------

@dataclass(frozen=True)
class Label:
    def __str__(self) -> str:
        return "x"


@dataclass(frozen=True)
class Arg:
    i: int

    def __str__(self) -> str:
        return f"x{self.i}"


@dataclass(frozen=True)
class Reduct:
    j: int

    def __str__(self) -> str:
        return f"y{self.j}"


@dataclass(frozen=True)
class FunApp:
    i: int
    z: Label | Arg

    def __str__(self) -> str:
        return f"y{self.i}^{self.z}"


MetaVar = Label | Arg | Reduct | FunApp


class Kind(enum.Enum):
    UNLABELLED = "unlabelled"
    LABELLED = "labelled"


class Mode(enum.Enum):
    DETERMINISTIC = "deterministic"
    NONDETERMINISTIC = "nondeterministic"


class SpecSyntaxError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        super().__init__(msg if line is None else f"line {line}: {msg}")
        self.line = line


class DesugarError(ValueError):
    pass


class LawInputError(ValueError):
    pass


# -- rules ---------------------------------------------------------------------

@dataclass(frozen=True)
class Premise:
    """``x_pos -> target`` when ``label`` is None, else ``x_pos -label-> target``."""

    pos: int
    label: Label | Arg | None
    target: MetaVar


@dataclass(frozen=True)
class PartialRule:
    """A rule as written, possibly listing premises for only some positions."""

    id: str
    op: str
    arity: int
    kind: Kind
    premises: tuple[Premise, ...]
    conclusion: Term


@dataclass(frozen=True)
class HORule:
    id: str
    op: str
    arity: int
    W: frozenset[int]
    kind: Kind
    conclusion: Term

    @property
    def labelled(self) -> bool:
        return self.kind is Kind.LABELLED


def _w_bits(W: Iterable[int]) -> int:
    return sum(1 << (i - 1) for i in W)


def _subsets(n: int) -> list[frozenset[int]]:
    out = [frozenset(i + 1 for i in range(n) if mask >> i & 1) for mask in range(1 << n)]
    return out


@dataclass(frozen=True)
class Issue:
    kind: str  # missing | duplicate | scope | arity | unknown-op | dropped
    op: str
    W: frozenset[int]
    rule: str | None = None
    metavar: MetaVar | None = None
    message: str = ""

    def __str__(self) -> str:
        w = "{" + ",".join(map(str, sorted(self.W))) + "}"
        where = f"rule [{self.rule}] " if self.rule else ""
        mv = f" at {self.metavar}" if self.metavar is not None else ""
        return f"{self.kind}: {where}({self.op}, W={w}){mv}{': ' + self.message if self.message else ''}"


@dataclass(frozen=True)
class HOSpec:
    sig: Signature
    rules: tuple[HORule, ...]
    mode: Mode = Mode.DETERMINISTIC
    dropped: tuple[Issue, ...] = ()
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        index: dict[tuple[str, frozenset[int]], list[HORule]] = {}
        for r in self.rules:
            index.setdefault((r.op, r.W), []).append(r)
        object.__setattr__(self, "_index", {k: tuple(v) for k, v in index.items()})

    @property
    def deterministic(self) -> bool:
        return self.mode is Mode.DETERMINISTIC

    def rules_for(self, op: str, W: frozenset[int]) -> tuple[HORule, ...]:
        return self._index.get((op, W), ())

    def rule_for(self, op: str, W: frozenset[int]) -> HORule:
        rs = self.rules_for(op, W)
        if len(rs) != 1:
            raise LookupError(f"expected exactly one rule for ({op}, {sorted(W)}), found {len(rs)}")
        return rs[0]

    def rule(self, rule_id: str) -> HORule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)


# -- scoping and validation ----------------------------------------------------

def scope_violations(rule: HORule) -> list[MetaVar]:
    """Metavariables of the conclusion not permitted by the rule's premise shape."""
    n = rule.arity
    bad = []
    for mv in metas(rule.conclusion):
        ok = False
        if isinstance(mv, Arg):
            ok = 1 <= mv.i <= n
        elif isinstance(mv, Reduct):
            ok = mv.j in rule.W
        elif isinstance(mv, Label):
            ok = rule.labelled
        elif isinstance(mv, FunApp):
            if 1 <= mv.i <= n and mv.i not in rule.W:
                if isinstance(mv.z, Arg):
                    ok = 1 <= mv.z.i <= n
                else:
                    ok = rule.labelled
        if not ok:
            bad.append(mv)
    return bad


def _ill_formed_ops(t: Term, sig: Signature) -> list[str]:
    out = []
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Meta):
            continue
        if s.sym not in sig:
            out.append(f"unknown operator {s.sym!r}")
        elif sig.arity(s.sym) != len(s.args):
            out.append(f"{s.sym!r} applied to {len(s.args)} argument(s)")
        stack.extend(s.args)
    return out


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues

    def of_kind(self, kind: str) -> list[Issue]:
        return [i for i in self.issues if i.kind == kind]

    def __str__(self) -> str:
        return "ok" if self.ok else "\n".join(map(str, self.issues))


def validate(spec: HOSpec) -> ValidationReport:
    """Totality/uniqueness per ``(f, W)`` plus scoping of every conclusion."""
    issues: list[Issue] = list(spec.dropped)
    for r in spec.rules:
        if r.op not in spec.sig:
            issues.append(Issue("unknown-op", r.op, r.W, r.id, message="operator not in signature"))
            continue
        if spec.sig.arity(r.op) != r.arity or not r.W <= frozenset(range(1, r.arity + 1)):
            issues.append(Issue("arity", r.op, r.W, r.id, message="arity or premise shape out of range"))
            continue
        for mv in scope_violations(r):
            issues.append(Issue("scope", r.op, r.W, r.id, mv, "not bound by the premises"))
        for msg in _ill_formed_ops(r.conclusion, spec.sig):
            issues.append(Issue("arity", r.op, r.W, r.id, message=f"conclusion: {msg}"))
    for op in spec.sig.ops:
        for W in _subsets(op.arity):
            found = spec.rules_for(op.name, W)
            if not found:
                issues.append(Issue("missing", op.name, W))
            elif spec.deterministic and len(found) > 1:
                ids = ", ".join(r.id for r in found)
                issues.append(Issue("duplicate", op.name, W, message=f"rules {ids}"))
    return ValidationReport(tuple(issues))


# -- desugaring ----------------------------------------------------------------

def _suffix(k: int) -> str:
    letters = ""
    k += 1
    while k:
        k, r = divmod(k - 1, 26)
        letters = chr(ord("a") + r) + letters
    return letters


def desugar(
    partial_rules: Sequence[PartialRule],
    sig: Signature,
    mode: Mode = Mode.DETERMINISTIC,
) -> HOSpec:
    """Complete every partial rule over its unlisted argument positions.

    Each unlisted position independently becomes reducing or function-like.
    Completions are ordered by ``W`` read as a bit set; with more than one
    completion the rule id gets a ``-a``, ``-b``, ... suffix. Completions
    whose conclusion is ill-scoped are dropped and recorded on the returned
    spec, where :func:`validate` reports them.
    """
    rules: list[HORule] = []
    dropped: list[Issue] = []
    for pr in partial_rules:
        reducing = {p.pos for p in pr.premises if p.label is None}
        applied = {p.pos for p in pr.premises if p.label is not None}
        both = reducing & applied
        if both:
            raise DesugarError(
                f"rule [{pr.id}]: position(s) {sorted(both)} both reduce and are applied"
            )
        for p in pr.premises:
            if not 1 <= p.pos <= pr.arity:
                raise DesugarError(f"rule [{pr.id}]: premise on x{p.pos} out of range")
            if isinstance(p.label, Label) and pr.kind is Kind.UNLABELLED:
                raise DesugarError(f"rule [{pr.id}]: premise at label x in an unlabelled rule")
        for mv in metas(pr.conclusion):
            if isinstance(mv, FunApp) and mv.i in reducing:
                raise DesugarError(f"rule [{pr.id}]: {mv} used but x{mv.i} is a reducing premise")
            if isinstance(mv, Reduct) and mv.j in applied:
                raise DesugarError(f"rule [{pr.id}]: {mv} used but x{mv.j} is applied as a function")
        free = [i for i in range(1, pr.arity + 1) if i not in reducing and i not in applied]
        completions = sorted(
            (frozenset(reducing | set(extra)) for k in range(len(free) + 1)
             for extra in itertools.combinations(free, k)),
            key=_w_bits,
        )
        for k, W in enumerate(completions):
            rid = pr.id if len(completions) == 1 else f"{pr.id}-{_suffix(k)}"
            rule = HORule(rid, pr.op, pr.arity, W, pr.kind, pr.conclusion)
            bad = scope_violations(rule)
            if bad:
                for mv in bad:
                    dropped.append(Issue("dropped", pr.op, W, rid, mv, "ill-scoped completion"))
                continue
            rules.append(rule)
    return HOSpec(sig, tuple(rules), mode, tuple(dropped))


# -- concrete syntax -----------------------------------------------------------

_ARROW = re.compile(r"^(?P<lhs>.*?)\s+-(?:(?P<label>[A-Za-z0-9_]+)-)?>\s+(?P<rhs>.+)$")
_PREMISE = re.compile(r"^x(?P<pos>\d+)\s+-(?:(?P<label>x\d*)-)?>\s+(?P<target>[A-Za-z_][A-Za-z0-9_'^]*)$")
_RULE = re.compile(r"^rule\s+\[(?P<id>[^\]]+)\]\s*(?P<premises>.*?)\|-\s*(?P<concl>.+)$")
_CANON = re.compile(r"^(?:(?P<x>x)|x(?P<arg>\d+)|y(?P<red>\d+)|y(?P<fi>\d+)\^x(?P<fz>\d*))$")


def _canonical(name: str) -> MetaVar | None:
    m = _CANON.match(name)
    if m is None:
        return None
    if m.group("x"):
        return Label()
    if m.group("arg"):
        return Arg(int(m.group("arg")))
    if m.group("red"):
        return Reduct(int(m.group("red")))
    z = m.group("fz")
    return FunApp(int(m.group("fi")), Arg(int(z)) if z else Label())


def _label_of(text: str | None) -> Label | Arg | None:
    if text is None:
        return None
    return Label() if text == "x" else Arg(int(text[1:]))


def _parse_rule(line: str, lineno: int, sig: Signature) -> PartialRule:
    m = _RULE.match(line)
    if m is None:
        raise SpecSyntaxError("malformed rule; expected 'rule [id] premises |- conclusion'", lineno)
    rid = m.group("id").strip()
    bound: dict[str, MetaVar] = {}
    premises = []
    ptext = m.group("premises").strip()
    for chunk in filter(None, (c.strip() for c in ptext.split(","))) if ptext else ():
        pm = _PREMISE.match(chunk)
        if pm is None:
            raise SpecSyntaxError(f"rule [{rid}]: malformed premise {chunk!r}", lineno)
        pos = int(pm.group("pos"))
        label = _label_of(pm.group("label"))
        target = Reduct(pos) if label is None else FunApp(pos, label)
        name = pm.group("target")
        if name in bound and bound[name] != target:
            raise SpecSyntaxError(f"rule [{rid}]: name {name!r} bound twice", lineno)
        bound[name] = target
        premises.append(Premise(pos, label, target))
    cm = _ARROW.match(m.group("concl").strip())
    if cm is None:
        raise SpecSyntaxError(f"rule [{rid}]: conclusion needs '->' or '-x->'", lineno)
    label = cm.group("label") or ""
    if label not in ("", "x"):
        raise SpecSyntaxError(f"rule [{rid}]: conclusion label must be x, got {label!r}", lineno)
    kind = Kind.LABELLED if label == "x" else Kind.UNLABELLED

    def lhs_meta(name: str):
        mv = _canonical(name)
        return mv if isinstance(mv, Arg) else None

    def rhs_meta(name: str):
        if name in bound:
            return bound[name]
        return _canonical(name)

    try:
        lhs = parse_term(cm.group("lhs"), sig, lhs_meta)
        rhs = parse_term(cm.group("rhs"), sig, rhs_meta)
    except ParseError as exc:
        raise SpecSyntaxError(f"rule [{rid}]: {exc}", lineno) from None
    if not isinstance(lhs, Op):
        raise SpecSyntaxError(f"rule [{rid}]: left-hand side must be an operator", lineno)
    n = len(lhs.args)
    if lhs.args != tuple(Meta(Arg(i)) for i in range(1, n + 1)):
        raise SpecSyntaxError(f"rule [{rid}]: left-hand side must be {lhs.sym}(x1,...,x{n})", lineno)
    return PartialRule(rid, lhs.sym, n, kind, tuple(premises), rhs)


def parse_spec(text: str) -> HOSpec:
    """Parse the line-oriented spec format and desugar it."""
    name = ""
    decls: list[OpDecl] = []
    rule_lines: list[tuple[int, str]] = []
    mode = Mode.DETERMINISTIC
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split(None, 1)[0]
        if head == "signature":
            name = line.split(None, 1)[1].strip() if " " in line else ""
        elif head == "nondeterministic":
            mode = Mode.NONDETERMINISTIC
        elif head == "deterministic":
            mode = Mode.DETERMINISTIC
        elif head == "op":
            for chunk in filter(None, (c.strip() for c in line.split(";"))):
                om = re.match(r"^op\s+(\S+)\s*:\s*(\d+)(\s+infix)?$", chunk)
                if om is None:
                    raise SpecSyntaxError(f"malformed operator declaration {chunk!r}", lineno)
                decls.append(OpDecl(om.group(1), int(om.group(2)), bool(om.group(3))))
        elif head == "rule":
            rule_lines.append((lineno, line))
        else:
            raise SpecSyntaxError(f"unknown directive {head!r}", lineno)
    sig = Signature(tuple(decls), name)
    partial = [_parse_rule(line, lineno, sig) for lineno, line in rule_lines]
    return desugar(partial, sig, mode)


def load_spec(path: str | Path) -> HOSpec:
    return parse_spec(Path(path).read_text(encoding="utf-8"))


def format_rule(rule: HORule, sig: Signature) -> str:
    """Render a completed rule with its full premise list."""
    n = rule.arity
    prem = []
    labels = [Arg(j) for j in range(1, n + 1)] + ([Label()] if rule.labelled else [])
    for i in range(1, n + 1):
        if i in rule.W:
            prem.append(f"x{i} -> y{i}")
        else:
            prem.extend(f"x{i} -{z}-> {FunApp(i, z)}" for z in labels)
    lhs = Op(rule.op, tuple(Meta(Arg(i)) for i in range(1, n + 1)))
    arrow = "-x->" if rule.labelled else "->"
    concl = f"{print_term(lhs, sig)} {arrow} {print_term(rule.conclusion, sig)}"
    return f"rule [{rule.id}] {', '.join(prem)} |- {concl}".replace("]  |-", "] |-")


# -- the induced law on finite sets --------------------------------------------
#
# Elements of X and Y are integers. A behaviour in B_u(X, Y) is either an
# element of Y (a reduct) or a function table X -> Y. Results live in the
# free algebra over X + Y, whose generators are Meta(("X", u)) / Meta(("Y", k)).

@dataclass(frozen=True)
class YVal:
    k: int


@dataclass(frozen=True)
class FunTable:
    table: tuple[int, ...]


@dataclass(frozen=True)
class LawFun:
    """A labelled result: for each ``u`` in X, the term ``table[u]``."""

    table: tuple[Term, ...]


@dataclass(frozen=True)
class LawInput:
    op: str
    args: tuple[tuple[int, YVal | FunTable], ...]


def xgen(u: int) -> Meta:
    return Meta(("X", u))


def ygen(k: int) -> Meta:
    return Meta(("Y", k))


def _check_input(spec: HOSpec, x_size: int, y_size: int, w: LawInput) -> None:
    if w.op not in spec.sig or spec.sig.arity(w.op) != len(w.args):
        raise LawInputError(f"{w.op!r} with {len(w.args)} argument(s) is not in the signature")
    for u, v in w.args:
        if not 0 <= u < x_size:
            raise LawInputError(f"{u} is not an element of X (size {x_size})")
        if isinstance(v, YVal):
            if not 0 <= v.k < y_size:
                raise LawInputError(f"{v.k} is not an element of Y (size {y_size})")
        elif isinstance(v, FunTable):
            if len(v.table) != x_size or any(not 0 <= k < y_size for k in v.table):
                raise LawInputError(f"{v.table} is not a function table X -> Y")
        else:
            raise LawInputError(f"{v!r} is neither in Y nor in Y^X")


def _instantiate_rule(rule: HORule, w: LawInput, x_size: int) -> Term | LawFun:
    us = [u for u, _ in w.args]
    vs = [v for _, v in w.args]

    def env(u: int | None):
        def lookup(mv):
            if isinstance(mv, Arg):
                return xgen(us[mv.i - 1])
            if isinstance(mv, Reduct):
                return ygen(vs[mv.j - 1].k)
            if isinstance(mv, FunApp):
                arg = u if isinstance(mv.z, Label) else us[mv.z.i - 1]
                return ygen(vs[mv.i - 1].table[arg])
            if isinstance(mv, Label):
                return xgen(u)
            raise LawInputError(f"unexpected metavariable {mv!r}")
        return lookup

    if rule.labelled:
        return LawFun(tuple(subst_meta(rule.conclusion, env(u)) for u in range(x_size)))
    return subst_meta(rule.conclusion, env(None))


def instantiate_law(spec: HOSpec, x_size: int, y_size: int, w: LawInput):
    """Evaluate the law at ``w``: pick the rule for ``(f, W)`` and substitute.

    ``W`` is the set of positions whose behaviour is an element of Y.
    Deterministic specs yield a term or a :class:`LawFun`; nondeterministic
    specs yield a tuple of distinct results, one per matching rule.
    """
    _check_input(spec, x_size, y_size, w)
    W = frozenset(i + 1 for i, (_, v) in enumerate(w.args) if isinstance(v, YVal))
    if spec.deterministic:
        return _instantiate_rule(spec.rule_for(w.op, W), w, x_size)
    out = []
    for rule in spec.rules_for(w.op, W):
        r = _instantiate_rule(rule, w, x_size)
        if r not in out:
            out.append(r)
    return tuple(out)
