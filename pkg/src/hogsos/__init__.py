"""Higher-order rule specifications, their operational models, and bounded
bisimilarity checks for unary SKI and the λ-calculus."""

from .terms import Signature, Op, Meta, Context, parse_term, print_term, plug, subst_meta, enumerate_closed
from .hospec import HOSpec, HORule, desugar, validate, parse_spec, load_spec, instantiate_law
from .engine import OperationalModel, Reduce, Fun, model_for, step, step_nd, apply_fun, trace
from .bisim import BisimParams, BisimilarUpTo, NotBisimilar, bisim_det, bisim_nd, appbisim, open_ext, check_closure
from .instances import builtin
from .congruence import congruence_test, gen_context

__all__ = [
    "Signature", "Op", "Meta", "Context", "parse_term", "print_term", "plug", "subst_meta", "enumerate_closed",
    "HOSpec", "HORule", "desugar", "validate", "parse_spec", "load_spec", "instantiate_law",
    "OperationalModel", "Reduce", "Fun", "model_for", "step", "step_nd", "apply_fun", "trace",
    "BisimParams", "BisimilarUpTo", "NotBisimilar", "bisim_det", "bisim_nd", "appbisim", "open_ext",
    "check_closure", "builtin", "congruence_test", "gen_context",
]
