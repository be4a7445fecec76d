"""Command-line front end.

Exit codes: 0 when a result was delivered, 1 on usage or input errors,
2 when a requested expectation fails (``--expect-bisimilar``, ``--expect-ok``)
or a spec does not validate.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import lam as L
from .bisim import LambdaSystem, bisim_det, open_ext
from .congruence import DEFAULT_SEED, congruence_test
from .engine import Fun, Reduce
from .hospec import SpecSyntaxError, validate
from .instances import BUILTINS, InstanceBundle, builtin, resolve_spec
from .lawlab import BudgetError, check_all, label_case_mutant
from .terms import ParseError, SignatureError, print_term

class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(text)


def _bundle(ref: str):
    """Resolve a builtin id or a spec path to an instance bundle."""
    if ref in BUILTINS:
        return builtin(ref)
    _, spec = resolve_spec(ref)
    return InstanceBundle(id=ref, doc=f"rule spec {ref}", spec=spec)


# -- subcommands ---------------------------------------------------------------

def cmd_run(args) -> int:
    b = _bundle(args.spec)
    if b.is_lambda:
        terms, terminal = L.trace_lambda(b.parse(args.term, args.stage), args.steps, args.stage, b.style)
        shown = [L.print_lambda(t, args.stage) for t in terms]
    else:
        if b.nondeterministic:
            raise UsageError("run needs a deterministic spec; use step for nondeterministic ones")
        tr = b.model.trace(b.parse(args.term), args.steps)
        shown, terminal = [b.show(t) for t in tr.terms], tr.terminal
    _emit(args, {"trace": shown, "terminal": terminal}, "\n".join(shown) + f"\n[{terminal}]")
    return 0


def _behaviour_json(b, beh, stage: int = 0) -> dict:
    if isinstance(beh, (Reduce, L.Reduce)):
        shown = L.print_lambda(beh.term, stage) if isinstance(beh, L.Reduce) else b.show(beh.term)
        return {"behaviour": "reduce", "term": shown}
    if isinstance(beh, Fun):
        return {"behaviour": "fun", "rule": beh.rule.id}
    if isinstance(beh, L.Fun):
        return {"behaviour": "fun"}
    return {"behaviour": "stuck"}


def cmd_step(args) -> int:
    b = _bundle(args.spec)
    if b.is_lambda:
        out = _behaviour_json(b, L.step(b.parse(args.term, args.stage), args.stage, b.style), args.stage)
    elif b.nondeterministic:
        out = {"behaviours": [_behaviour_json(b, x) for x in b.model.step_nd(b.parse(args.term))]}
    else:
        out = _behaviour_json(b, b.model.step(b.parse(args.term)))
    items = out.get("behaviours", [out])
    text = "\n".join(" ".join(str(v) for v in item.values()) for item in items)
    _emit(args, out, text)
    return 0


def _verdict_exit(args, verdict, show) -> int:
    payload = verdict.to_json(show)
    text = payload["verdict"]
    if not verdict.bisimilar:
        text += f" (clause {payload['clause']}, {len(payload['witness'])} moves)"
    _emit(args, payload, text)
    return 2 if args.expect_bisimilar and not verdict.bisimilar else 0


def cmd_bisim(args) -> int:
    b = _bundle(args.spec)
    p = b.params(args.depth, args.probe_size, args.opaque)
    if b.is_lambda:
        sys_ = LambdaSystem(b.style, p.probes, p.subst_samples)
        s1, s2 = (b.parse(args.t1, args.stage), args.stage), (b.parse(args.t2, args.stage), args.stage)
        return _verdict_exit(args, bisim_det(sys_, s1, s2, p), sys_.show)
    v = b.decide(b.parse(args.t1), b.parse(args.t2), p)
    return _verdict_exit(args, v, b.show)


def cmd_appbisim(args) -> int:
    b = builtin(f"lambda_{args.style}")
    p = b.params(args.depth, args.probe_size)
    t1, t2 = b.parse(args.t1, args.stage), b.parse(args.t2, args.stage)
    v = open_ext(t1, t2, args.stage, b.style, p)
    return _verdict_exit(args, v, lambda t: L.print_lambda(t, 0))


def cmd_lawcheck(args) -> int:
    b = _bundle(args.spec)
    if b.is_lambda:
        raise UsageError("lawcheck needs a rule spec")
    law = label_case_mutant(args.mutant) if args.mutant else None
    summary = check_all(b.spec, args.max_set, law)
    out = summary.to_json(b.spec)
    text = (f"dinaturality: {out['dinaturality']['checked']} checked, "
            f"{out['dinaturality']['counterexamples']} counterexamples\n"
            f"naturality_Y: {out['naturality_Y']['checked']} checked, "
            f"{out['naturality_Y']['counterexamples']} counterexamples")
    if "first_counterexample" in out:
        text += "\nfirst counterexample: " + json.dumps(out["first_counterexample"], ensure_ascii=False)
    _emit(args, out, text)
    return 2 if args.expect_ok and not summary.ok else 0


def cmd_congruence(args) -> int:
    b = _bundle(args.instance)
    pairs = [tuple(pq) for pq in args.pair] if args.pair else list(b.equivalent)
    if not pairs:
        raise UsageError("no pairs given and the instance ships none")
    p = b.params(args.depth, args.probe_size, args.opaque)
    report = congruence_test(b, pairs, args.contexts, args.max_context_size, p, args.seed)
    out = report.to_json()
    text = (f"{report.note}\n\ninstance {report.instance}, seed {report.seed}: {len(report.pairs)} pairs x "
            f"{report.contexts_per_pair} contexts, {len(report.rejected)} rejected, "
            f"{len(report.counterexamples)} counterexamples")
    _emit(args, out, text)
    return 2 if args.expect_bisimilar and not report.ok else 0


def cmd_instances(args) -> int:
    out = [builtin(i).to_json() for i in BUILTINS]
    _emit(args, {"instances": out}, "\n".join(f"{o['id']}: {o['doc']}" for o in out))
    return 0


def cmd_validate(args) -> int:
    b = _bundle(args.spec)
    if b.is_lambda:
        raise UsageError("validate needs a rule spec")
    report = validate(b.spec)
    out = {"ok": report.ok, "rules": len(b.spec.rules),
           "issues": [{"kind": i.kind, "op": i.op, "W": sorted(i.W) if i.W is not None else None,
                       "rule": i.rule, "metavar": str(i.metavar) if i.metavar is not None else None,
                       "message": i.message} for i in report.issues]}
    _emit(args, out, str(report))
    return 0 if report.ok else 2


# -- argument handling ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hogsos", description="Higher-order rule specs, operational models and bounded bisimilarity.")
    ap.add_argument("--config", help="JSON file whose keys set flag defaults")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, game=False):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if game:
            p.add_argument("--depth", type=int, default=8)
            p.add_argument("--probe-size", type=int, default=3)
            p.add_argument("--opaque", action="store_true", help="add an inert self-looping probe constant")
            p.add_argument("--expect-bisimilar", action="store_true", help="exit 2 unless bisimilar")
        return p

    p = common(sub.add_parser("run", help="trace reductions"))
    p.add_argument("spec")
    p.add_argument("term")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--stage", type=int, default=0)
    p.set_defaults(func=cmd_run)

    p = common(sub.add_parser("step", help="one-step behaviour"))
    p.add_argument("spec")
    p.add_argument("term")
    p.add_argument("--stage", type=int, default=0)
    p.set_defaults(func=cmd_step)

    p = common(sub.add_parser("bisim", help="bounded bisimulation game"), game=True)
    p.add_argument("spec")
    p.add_argument("t1")
    p.add_argument("t2")
    p.add_argument("--stage", type=int, default=0)
    p.set_defaults(func=cmd_bisim)

    p = common(sub.add_parser("appbisim", help="applicative bisimilarity of λ-terms"), game=True)
    p.add_argument("t1")
    p.add_argument("t2")
    p.add_argument("--style", choices=["cbn", "cbv"], default="cbn")
    p.add_argument("--stage", type=int, default=0)
    p.set_defaults(func=cmd_appbisim)

    p = common(sub.add_parser("lawcheck", help="exhaustive dinaturality and naturality checks"))
    p.add_argument("spec")
    p.add_argument("--max-set", type=int, default=2)
    p.add_argument("--mutant", metavar="OP", help="check the label-inspecting mutant of OP instead")
    p.add_argument("--expect-ok", action="store_true", help="exit 2 on any counterexample")
    p.set_defaults(func=cmd_lawcheck)

    p = common(sub.add_parser("congruence", help="random-context congruence test"), game=True)
    p.add_argument("instance")
    p.add_argument("--pair", nargs=2, action="append", metavar=("T1", "T2"))
    p.add_argument("--contexts", type=int, default=200)
    p.add_argument("--max-context-size", type=int, default=5)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_congruence)

    p = common(sub.add_parser("instances", help="list shipped instances"))
    p.set_defaults(func=cmd_instances)

    p = common(sub.add_parser("validate", help="check a rule spec"))
    p.add_argument("spec")
    p.set_defaults(func=cmd_validate)
    return ap


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                conf = json.load(fh)
        except (OSError, ValueError) as e:
            ap.error(f"cannot read config {args.config}: {e}")
        # Config values act as defaults: re-parse so explicit flags still win.
        sub = ap._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**{k.replace("-", "_"): v for k, v in conf.items()})
        args = ap.parse_args(argv)
    if "seed" in args and os.environ.get("HOGSOS_SEED"):
        try:
            args.seed = int(os.environ["HOGSOS_SEED"])
        except ValueError:
            ap.error(f"HOGSOS_SEED must be an integer, got {os.environ['HOGSOS_SEED']!r}")
    return args


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(sys.argv[1:] if argv is None else list(argv))
    try:
        return args.func(args)
    except (UsageError, ParseError, SignatureError, SpecSyntaxError, L.LambdaSyntaxError, L.StageError,
            BudgetError, FileNotFoundError, KeyError, ValueError) as e:
        print(f"hogsos: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
