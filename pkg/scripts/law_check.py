"""Exhaustive parametricity checks for a spec, plus the mutant as a control.

    python3 scripts/law_check.py [SPEC] [--max-set N]
"""

import argparse
import json
import sys

from hogsos.instances import resolve_spec
from hogsos.lawlab import check_all, label_case_mutant


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("spec", nargs="?", default="skiu")
    ap.add_argument("--max-set", type=int, default=2)
    ap.add_argument("--mutant-op", default="S")
    args = ap.parse_args()
    _, spec = resolve_spec(args.spec)
    real = check_all(spec, args.max_set)
    print("spec  ", json.dumps(real.to_json(spec)))
    mutant = check_all(spec, args.max_set, label_case_mutant(args.mutant_op))
    print("mutant", json.dumps({k: v for k, v in mutant.to_json(spec).items() if k != "first_counterexample"}))
    # the real rules must pass and the mutant control must fail
    return 0 if real.ok and not mutant.ok else 1


if __name__ == "__main__":
    sys.exit(main())
