"""Seeded witness-finder campaign: random sequences at the EGZ threshold.

Reports success counts and which strategy produced each witness.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from collections import Counter

from zerosum.group import make_group
from zerosum.sequence import verify_witness
from zerosum.witness import find_exp_product_one, random_sequence

DEFAULT_GROUPS = ["12:5", "15:4", "16:7", "20:11"]


def campaign(n: int, s: int, count: int, seed: int, target: int | None = None) -> dict:
    G = make_group(n, s)
    target = target or G.exponent()
    length = 2 * n if n % 2 == 0 else 3 * n
    if target == G.order and n % 2 == 0:
        length = 3 * n
    rng = random.Random(seed)
    strategies: Counter = Counter()
    failures = []
    t0 = time.perf_counter()
    for i in range(count):
        S = random_sequence(G, length, rng)
        out = find_exp_product_one(G, S, target)
        if out.witness is None or not verify_witness(S, out.witness):
            failures.append(str(S))
        strategies[out.strategy] += 1
    return {
        "group": G.label(),
        "length": length,
        "target": target,
        "count": count,
        "successes": count - len(failures),
        "strategies": dict(strategies),
        "failures": failures[:10],
        "seconds": round(time.perf_counter() - t0, 1),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("groups", nargs="*", default=DEFAULT_GROUPS)
    ap.add_argument("--count", type=int, default=10**4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--target", type=int, default=None, help="default exp(G); pass |G| for the Gao target")
    args = ap.parse_args(argv)
    bad = 0
    for text in args.groups:
        n, s = map(int, text.split(":"))
        row = campaign(n, s, args.count, args.seed + 1000 * n + s, args.target)
        bad += row["count"] - row["successes"]
        print(json.dumps(row), flush=True)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
