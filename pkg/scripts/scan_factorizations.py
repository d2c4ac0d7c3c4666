"""List proper (n, s) whose only coprime split n = n1 n2 (up to the factor h)
has a trivial factor, i.e. no split with n1, n2 >= 3 exists."""

from __future__ import annotations

import argparse
import sys

from zerosum.structure import factorize


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=200)
    args = ap.parse_args(argv)
    rows = []
    for n in range(8, args.max_n + 1):
        for s in range(2, n - 1):
            if (s * s) % n != 1:
                continue
            f = factorize(n, s)
            if min(f.n1, f.n2) < 3:
                power_of_two = n & (n - 1) == 0
                rows.append((n, s, f.n1, f.n2, f.h, power_of_two))
    for n, s, n1, n2, h, p2 in rows:
        print(f"n={n:4d} s={s:4d}  n1={n1} n2={n2} h={h}  {'2^t' if p2 else 's = n/2 +- 1'}")
    print(f"{sum(not r[5] for r in rows)} pairs outside n = 2^t", flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
