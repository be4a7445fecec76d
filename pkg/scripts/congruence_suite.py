"""Run the seeded congruence suites on every builtin instance.

    python3 scripts/congruence_suite.py [--seed N] [--contexts N] [--probe-size N]

Combinatory instances default to probes of size 2; at size 3 a single skiu
pair takes minutes.
"""

import argparse
import sys
import time

from hogsos.congruence import DEFAULT_SEED, GAP_NOTE, congruence_test
from hogsos.instances import BUILTINS, builtin


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--contexts", type=int, default=200)
    ap.add_argument("--max-context-size", type=int, default=5)
    ap.add_argument("--depth", type=int, default=8)
    ap.add_argument("--probe-size", type=int, default=None, help="default: 2 for specs, 3 for λ")
    args = ap.parse_args()
    print(GAP_NOTE, "\n")
    failed = False
    for name in BUILTINS:
        b = builtin(name)
        size = args.probe_size or (3 if b.is_lambda else 2)
        t0 = time.perf_counter()
        r = congruence_test(b, b.equivalent, args.contexts, args.max_context_size,
                            b.params(args.depth, size), args.seed)
        dt = time.perf_counter() - t0
        print(f"{name:11s} pairs={len(r.pairs)} checks={r.checks} rejected={len(r.rejected)} "
              f"counterexamples={len(r.counterexamples)} probes<={size} {dt:.1f}s")
        failed |= not r.ok
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
