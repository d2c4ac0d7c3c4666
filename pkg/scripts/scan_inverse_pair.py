"""Scan the cyclic EGZ inverse statement: for every n-sum-free S over C_n of
length 2n - k, look for a pair a, b with min(v_a, v_b) >= n - 2k + 3,
v_a + v_b >= 2n - 2k + 2 and gcd(a - b, n) = 1."""

from __future__ import annotations

import argparse
import itertools
import sys
from collections import Counter
from math import gcd

from zerosum.witness import zero_sum_positions


def scan(n: int, k: int):
    free = bad = 0
    example = None
    lo, total = n - 2 * k + 3, 2 * n - 2 * k + 2
    for combo in itertools.combinations_with_replacement(range(n), 2 * n - k):
        if zero_sum_positions(n, combo, n) is not None:
            continue
        free += 1
        c = Counter(combo)
        if not any(min(c[a], c[b]) >= lo and c[a] + c[b] >= total and gcd(a - b, n) == 1
                   for a in c for b in c if a != b):
            bad += 1
            example = example or combo
    return free, bad, example


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=8)
    args = ap.parse_args(argv)
    for n in range(2, args.max_n + 1):
        for k in range(2, n // 2 + 3):
            if 2 * n - k < 1:
                continue
            free, bad, example = scan(n, k)
            print(f"n={n} k={k} free={free} violations={bad} example={example}", flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
