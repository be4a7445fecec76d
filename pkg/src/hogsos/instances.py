"""Shipped instances: unary SKI, its nondeterministic extension, and the
call-by-name and call-by-value λ-calculi.

The combinatory instances are rule specs loaded from the package data
directory. The λ instances are hand-coded against :mod:`hogsos.lam`, since
the first-order rule format has no binders.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from . import lam as L
from .bisim import (
    BisimParams,
    LambdaSystem,
    NondetSpecSystem,
    SpecSystem,
    appbisim,
    bisim_det,
    bisim_nd,
    lambda_probes,
    ski_probes,
    with_opaque_probe,
)
from .engine import OperationalModel, model_for
from .hospec import HOSpec, load_spec
from .terms import parse_term, print_term

__all__ = [
    "GoldenTrace",
    "InstanceBundle",
    "BUILTINS",
    "builtin",
    "data_path",
    "resolve_spec",
    "replay_golden",
]

BUILTINS = ("skiu", "skiu_nd", "lambda_cbn", "lambda_cbv")


def data_path(name: str) -> Path:
    return Path(str(resources.files("hogsos") / "data" / name))


def resolve_spec(ref: str) -> tuple[str | None, HOSpec]:
    """A builtin id, a path, or a file name inside the data directory."""
    if ref in ("skiu", "skiu_nd"):
        return ref, load_spec(data_path(f"{ref}.spec"))
    path = Path(ref)
    if not path.exists():
        fallback = data_path(path.name)
        if not fallback.exists():
            raise FileNotFoundError(f"no spec named {ref!r}")
        path = fallback
    return None, load_spec(path)


@dataclass(frozen=True)
class GoldenTrace:
    """A reduction chain to a function, then the chain after one application."""

    start: str
    chain: tuple[str, ...]
    terminal: str
    probe: str | None = None
    after: tuple[str, ...] = ()


@dataclass
class InstanceBundle:
    id: str
    doc: str
    spec: HOSpec | None = None
    style: L.Style | None = None
    golden: tuple[GoldenTrace, ...] = ()
    equivalent: tuple[tuple[str, str], ...] = ()
    inequivalent: tuple[tuple[str, str], ...] = ()
    depth: int = 8
    probe_size: int = 3

    @property
    def is_lambda(self) -> bool:
        return self.style is not None

    @property
    def nondeterministic(self) -> bool:
        return self.spec is not None and not self.spec.deterministic

    @property
    def model(self) -> OperationalModel:
        if self.spec is None:
            raise TypeError(f"{self.id} has no rule spec")
        return model_for(self.spec)

    @property
    def step(self) -> Callable:
        """``t -> behaviour`` for specs, ``(t, n) -> behaviour`` for λ."""
        if self.is_lambda:
            style = self.style
            return lambda t, n=0: L.step(t, n, style)
        return self.model.step_nd if self.nondeterministic else self.model.step

    def parse(self, src: str, stage: int = 0):
        if self.is_lambda:
            return L.parse_lambda(src, stage)
        return parse_term(src, self.spec.sig)

    def show(self, t, stage: int = 0) -> str:
        if self.is_lambda:
            return L.print_lambda(t, stage)
        return print_term(t, self.spec.sig)

    def params(self, depth: int | None = None, probe_size: int | None = None, opaque: bool = False) -> BisimParams:
        d = self.depth if depth is None else depth
        s = self.probe_size if probe_size is None else probe_size
        if self.is_lambda:
            return BisimParams(d, lambda_probes(s))
        sig = with_opaque_probe(self.spec).sig if opaque else self.spec.sig
        return BisimParams(d, ski_probes(sig, s, opaque), opaque_probe=opaque)

    def system(self, p: BisimParams):
        if self.is_lambda:
            return LambdaSystem(self.style, p.probes, p.subst_samples)
        spec = with_opaque_probe(self.spec) if p.opaque_probe else self.spec
        model = model_for(spec)
        return NondetSpecSystem(model, p.probes) if self.nondeterministic else SpecSystem(model, p.probes)

    def decide(self, t1: Any, t2: Any, p: BisimParams, cache: dict | None = None):
        """The instance's bounded equivalence on closed terms.

        Pass the same ``cache`` dict to calls sharing ``p`` to reuse work.
        """
        if self.is_lambda:
            return appbisim(t1, t2, self.style, p, cache)
        sys = self.system(p)
        if self.nondeterministic:
            return bisim_nd(sys, t1, t2, p, cache)
        return bisim_det(sys, t1, t2, p, cache)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "doc": self.doc,
            "kind": "lambda" if self.is_lambda else "spec",
            "rules": len(self.spec.rules) if self.spec is not None else None,
            "equivalent": [list(p) for p in self.equivalent],
            "inequivalent": [list(p) for p in self.inequivalent],
            "depth": self.depth,
            "probe_size": self.probe_size,
        }


# A diverging combinatory term: w = S''(I, I) self-applies.
_SKI_OMEGA = "S''(I, I) S''(I, I)"

_SKIU_GOLDEN = (
    GoldenTrace("S K I", ("S K I", "S'(K) I", "S''(K, I)"), "fun",
                "S", ("K S (I S)", "K'(S) (I S)", "S")),
    GoldenTrace("S K K", ("S K K", "S'(K) K", "S''(K, K)"), "fun",
                "S", ("K S (K S)", "K'(S) (K S)", "S")),
)

# Closed λ-pairs in surface syntax (innermost binder is 0).
_LAMBDA_EQ = (
    (r"(\. 0) (\. 0)", r"(\. \. 0) (\. 0)"),
    (r"\. (\. 0) 0", r"\. (\. 1) 0"),
    (r"(\. 0 0) (\. 0 0)", r"(\. 0 0 0) (\. 0 0 0)"),
)


def _skiu() -> InstanceBundle:
    return InstanceBundle(
        id="skiu",
        doc="Unary SKI combinators with explicit application (8 sugared rules).",
        spec=load_spec(data_path("skiu.spec")),
        golden=_SKIU_GOLDEN,
        equivalent=(("S K I", "S K K"), ("S''(K, I)", "S''(K, K)")),
        inequivalent=(("K", "I"), ("S", "K"), ("I", "S K K")),
    )


def _skiu_nd() -> InstanceBundle:
    p = _SKI_OMEGA
    return InstanceBundle(
        id="skiu_nd",
        doc="Unary SKI extended by binary nondeterministic choice oplus.",
        spec=load_spec(data_path("skiu_nd.spec")),
        equivalent=((f"oplus({p}, {p})", p), ("oplus(S, K)", "oplus(K, S)")),
        inequivalent=(("oplus(K, I)", "K"),),
    )


def _lambda(style: L.Style) -> InstanceBundle:
    if style is L.Style.CBN:
        return InstanceBundle(
            id="lambda_cbn",
            doc="Call-by-name λ-calculus, de Bruijn terms, strong applicative bisimilarity.",
            style=style,
            equivalent=_LAMBDA_EQ,
            inequivalent=((r"\. 0", r"(\. 0) (\. 0)"), (r"(\. 0 0) (\. 0 0)", r"\. 0")),
        )
    return InstanceBundle(
        id="lambda_cbv",
        doc="Call-by-value λ-calculus, de Bruijn terms, strong applicative bisimilarity.",
        style=style,
        equivalent=(_LAMBDA_EQ[0], _LAMBDA_EQ[2]),
        inequivalent=((r"(\. \. 0) ((\. 0 0) (\. 0 0))", r"\. 0"),),
    )


def builtin(id: str) -> InstanceBundle:
    if id == "skiu":
        return _skiu()
    if id == "skiu_nd":
        return _skiu_nd()
    if id == "lambda_cbn":
        return _lambda(L.Style.CBN)
    if id == "lambda_cbv":
        return _lambda(L.Style.CBV)
    raise KeyError(f"unknown instance {id!r}; known: {', '.join(BUILTINS)}")


def replay_golden(bundle: InstanceBundle, max_steps: int = 10) -> list[str]:
    """Replay every golden trace; returns a list of mismatch descriptions."""
    problems = []
    model = bundle.model
    for g in bundle.golden:
        tr = model.trace(bundle.parse(g.start), max_steps)
        got = tuple(bundle.show(t) for t in tr.terms)
        if got != g.chain or tr.terminal != g.terminal:
            problems.append(f"{g.start}: got {list(got)} ending in {tr.terminal}")
            continue
        if g.probe is None:
            continue
        fun = model.step(tr.terms[-1])
        after = model.trace(model.apply(fun, bundle.parse(g.probe)), len(g.after) - 1)
        got = tuple(bundle.show(t) for t in after.terms)
        if got != g.after:
            problems.append(f"{g.start} at {g.probe}: got {list(got)}")
    return problems
