"""Replay the shipped golden traces and print each chain.

    python3 scripts/replay_golden.py
"""

import sys

from hogsos.instances import builtin, replay_golden


def main() -> int:
    b = builtin("skiu")
    for g in b.golden:
        print(" -> ".join(g.chain), f"[{g.terminal}]")
        if g.probe is not None:
            print(f"  at {g.probe}:", " -> ".join(g.after))
    problems = replay_golden(b)
    for p in problems:
        print("MISMATCH", p)
    print("ok" if not problems else f"{len(problems)} mismatches")
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main())
