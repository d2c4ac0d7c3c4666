"""Plain Gao-constant search (no disjoint-witness bound), with a time budget.

Used to measure how far the unbounded DFS gets at n = 8; prints node counts,
the budget outcome and, when the search completes, how many extremal classes
fall in the length-(3n - 1) family.
"""

from __future__ import annotations

import argparse
import sys

from zerosum.group import make_group
from zerosum.invariants import GAO, SearchBudget, compute_invariant
from zerosum.structure import GAO_EVEN, classify_inverse


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--s", type=int, default=3)
    ap.add_argument("--max-seconds", type=float, default=7200.0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)
    G = make_group(args.n, args.s)
    r = compute_invariant(G, GAO, SearchBudget(max_seconds=args.max_seconds), args.workers)
    st = r.stats
    print(f"{G.label()} E: value={r.value} method={r.method} nodes={st.nodes} "
          f"pruned_symmetry={st.pruned_symmetry} pruned_avoidance={st.pruned_avoidance} "
          f"seconds={st.elapsed_ms / 1000:.0f}", flush=True)
    if r.exhaustive and G.n % 2 == 0:
        matched = sum(classify_inverse(G, S, GAO_EVEN) is not None for S in r.extremal)
        print(f"extremal classes={len(r.extremal)} in family={matched}", flush=True)
        for S in r.extremal:
            if classify_inverse(G, S, GAO_EVEN) is None:
                print("  unmatched:", S, flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
