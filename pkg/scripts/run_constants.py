"""Compute d, eta, s and E for a list of groups and write one CSV row per value.

    python scripts/run_constants.py 8:3 8:5 12:5 12:7 --kinds d,eta --out runs/constants.csv
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from zerosum.group import make_cyclic, make_dihedral, make_group
from zerosum.invariants import KIND_ALIASES, SearchBudget, check_relations, compute_invariant, reports_to_csv


def parse_group(text: str):
    """'8:3' for G_{8,3}, 'C7' for C_7, 'D5' for the dihedral group of order 10."""
    if text[0] in "Cc":
        return make_cyclic(int(text[1:]))
    if text[0] in "Dd":
        return make_dihedral(int(text[1:]))
    n, s = text.split(":")
    return make_group(int(n), int(s))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("groups", nargs="+", help="n:s, Cn or Dn")
    ap.add_argument("--kinds", default="d,eta,s,E")
    ap.add_argument("--max-nodes", type=int, default=10**9)
    ap.add_argument("--max-seconds", type=float, default=7200.0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--plain-gao", action="store_true", help="skip the disjoint-witness bound for E")
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args(argv)

    budget = SearchBudget(max_nodes=args.max_nodes, max_seconds=args.max_seconds)
    kinds = [KIND_ALIASES[k.strip()] for k in args.kinds.split(",")]
    reports = []
    for text in args.groups:
        G = parse_group(text)
        batch = []
        for kind in kinds:
            t0 = time.perf_counter()
            r = compute_invariant(G, kind, budget, args.workers, disjoint_bound=not args.plain_gao)
            batch.append(r)
            print(f"{G.label():>10} {kind:>9} = {r.value:<4} {r.method:<17} predicted {r.predicted!s:<16}"
                  f" {len(r.extremal):>4} classes  {time.perf_counter() - t0:7.1f} s", flush=True)
        for name, ok in check_relations(batch):
            if not ok:
                print(f"{G.label():>10} relation fails: {name}", flush=True)
        reports += batch
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(reports_to_csv(reports))
    return 0


if __name__ == "__main__":
    sys.exit(main())
