"""Exhaustive computation of d, eta, s and E with symmetry-reduced search.

The search is an orderly generation of multisets: a node is a nondecreasing
tuple of flat element indices, children append an index >= the last one, and
a node survives only if it is the lexicographically least sorted image under
the automorphism group.  Canonicity is inherited by prefixes obtained by
dropping the largest term, so every orbit of avoiding sequences is visited
exactly once.

Avoidance is hereditary, and a new term g creates a forbidden subsequence
T.g iff g^{-1} lies in Pi_{j-1}(T) for a forbidden length j (rotate the
ordering so g comes last).  Each node therefore computes one "forbidden"
mask from its coset sums and tests candidate extensions by a single bit.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence as Seq, Tuple, Union

from .cosets import CosetSums
from .group import ABELIAN, DIHEDRAL, GroupSpec
from .sequence import DEFAULT_STATE_CAP, BudgetExceeded, ProductTable, Sequence
from .structure import automorphisms, factorize

DAVENPORT = "davenport"
ETA = "eta"
EGZ = "egz"
GAO = "gao"
KINDS = (DAVENPORT, ETA, EGZ, GAO)

EXHAUSTIVE = "exhaustive"
BUDGET_EXHAUSTED = "budget_exhausted"
PREDICTED_ONLY = "predicted_only"

EXCLUDED = "excluded (n1=3)"

# CLI aliases: d, eta, s, E
KIND_ALIASES = {"d": DAVENPORT, "eta": ETA, "s": EGZ, "E": GAO}
for _k in KINDS:
    KIND_ALIASES[_k] = _k


class OutsideTheoremRange(ValueError):
    pass


@dataclass
class SearchBudget:
    max_nodes: int = 10**9
    max_seconds: float = 3600.0
    max_states: int = DEFAULT_STATE_CAP

    def __post_init__(self) -> None:
        if self.max_nodes <= 0 or self.max_seconds <= 0 or self.max_states <= 0:
            raise ValueError("budget fields must be positive")


@dataclass
class SearchStats:
    nodes: int = 0
    pruned_symmetry: int = 0
    pruned_avoidance: int = 0
    pruned_bound: int = 0
    elapsed_ms: float = 0.0

    def merge(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        self.pruned_symmetry += other.pruned_symmetry
        self.pruned_avoidance += other.pruned_avoidance
        self.pruned_bound += other.pruned_bound
        self.elapsed_ms = max(self.elapsed_ms, other.elapsed_ms)


@dataclass
class InvariantReport:
    group: GroupSpec
    kind: str
    value: int
    method: str
    extremal: List[Sequence] = field(default_factory=list)
    stats: SearchStats = field(default_factory=SearchStats)
    predicted: Optional[Union[int, str]] = None
    extremal_complete: bool = True
    notes: List[str] = field(default_factory=list)

    @property
    def exhaustive(self) -> bool:
        return self.method == EXHAUSTIVE

    def row(self) -> dict:
        return {
            "n": self.group.n,
            "s": self.group.s,
            "kind": self.kind,
            "value": self.value,
            "method": self.method,
            "extremal_count": len(self.extremal),
            "nodes": self.stats.nodes,
            "ms": round(self.stats.elapsed_ms, 1),
        }

    def to_json(self) -> dict:
        out = self.row()
        out.update(
            group=self.group.label(),
            predicted=self.predicted,
            stats={
                "nodes": self.stats.nodes,
                "pruned_symmetry": self.stats.pruned_symmetry,
                "pruned_avoidance": self.stats.pruned_avoidance,
                "pruned_bound": self.stats.pruned_bound,
                "elapsed_ms": round(self.stats.elapsed_ms, 1),
            },
            extremal=[str(S) for S in self.extremal],
            extremal_complete=self.extremal_complete,
            notes=list(self.notes),
        )
        return out


REPORT_FIELDS = ("n", "s", "kind", "value", "method", "extremal_count", "nodes", "ms")


def reports_to_csv(reports: Seq[InvariantReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=REPORT_FIELDS)
    w.writeheader()
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def reports_to_json(reports: Seq[InvariantReport]) -> str:
    return json.dumps([r.to_json() for r in reports], indent=2)


# -- predictions -------------------------------------------------------------


def theorem_values(G: GroupSpec) -> Dict[str, Union[int, str]]:
    """Known values of d, eta, s, E for G (or the excluded-case marker)."""
    n = G.n
    if G.rotations_only:
        return {DAVENPORT: n - 1, ETA: n, EGZ: 2 * n - 1, GAO: 2 * n - 1}
    if G.s_class == ABELIAN:
        if n % 2 == 0:
            raise OutsideTheoremRange(f"C_{n} x C_2 is not covered")
        m = 2 * n  # C_n x C_2 is cyclic of order 2n
        return {DAVENPORT: m - 1, ETA: m, EGZ: 2 * m - 1, GAO: 2 * m - 1}
    if G.s_class == DIHEDRAL:
        if n < 3:
            raise OutsideTheoremRange(f"D_{2 * n} is abelian")
        return {DAVENPORT: n, ETA: n + 1, EGZ: 2 * n if n % 2 == 0 else 3 * n, GAO: 3 * n}
    if n < 8:
        raise OutsideTheoremRange(f"outside theorem range: n = {n} < 8")
    out: Dict[str, Union[int, str]] = {DAVENPORT: n, ETA: n + 1}
    if n % 2 == 0:
        out.update({EGZ: 2 * n, GAO: 3 * n})
    elif factorize(n, G.s).n1 > 3:
        out.update({EGZ: 3 * n, GAO: 3 * n})
    else:
        out.update({EGZ: EXCLUDED, GAO: EXCLUDED})
    return out


def predicted(G: GroupSpec, kind: str) -> Optional[Union[int, str]]:
    try:
        return theorem_values(G)[kind]
    except OutsideTheoremRange:
        return None


# -- symmetry ----------------------------------------------------------------


def symmetry_perms(G: GroupSpec) -> Tuple[Tuple[int, ...], ...]:
    """Automorphisms used for orbit reduction, as flat-index permutations."""
    if G.rotations_only:
        import math

        units = [u for u in range(1, G.n) if math.gcd(u, G.n) == 1] or [1]
        return tuple(tuple((u * k) % G.n for k in range(G.n)) for u in units)
    if G.n < 3:
        return (tuple(range(G.order)),)
    return automorphisms(G)


def _is_canonical(seq: Tuple[int, ...], perms) -> bool:
    target = list(seq)
    for get in perms:
        if sorted(map(get, seq)) < target:
            return False
    return True


def canonicalize(G: GroupSpec, S: Sequence) -> Sequence:
    """Lexicographically least image of S under the automorphisms of G."""
    seq = [G.index(g) for g in S]
    best = min(sorted(p[i] for i in seq) for p in symmetry_perms(G))
    return Sequence.from_elements(G, [G.element(i) for i in best])


# -- avoidance predicates ----------------------------------------------------------


def avoided_lengths(G: GroupSpec, kind: str, upto: int) -> List[int]:
    if kind == DAVENPORT:
        return list(range(1, upto + 1))
    if kind == ETA:
        return list(range(1, G.exponent() + 1))
    if kind == EGZ:
        return [G.exponent()]
    if kind == GAO:
        return [G.order]
    raise ValueError(f"unknown invariant kind {kind!r}")


def depth_cap(G: GroupSpec, kind: str) -> int:
    """Upper bound on the length of an avoiding sequence, plus one."""
    if kind in (DAVENPORT, ETA):
        return G.order  # d(G) + 1 <= |G|
    return 2 * G.order  # E(G) <= 2|G| - 1


def avoids(S: Sequence, kind: str, method: str = "auto", cap: int = DEFAULT_STATE_CAP) -> bool:
    """True iff S has no forbidden product-one subsequence for ``kind``.

    ``method="table"`` uses ProductTable, ``"cosets"`` the coset engine,
    ``"auto"`` the table when it fits under ``cap``.
    """
    G = S.group
    lengths = [j for j in avoided_lengths(G, kind, len(S)) if j <= len(S)]
    if not lengths:
        return True
    if method == "auto":
        states = 1
        for _, m in S.terms:
            states *= m + 1
        method = "table" if states <= min(cap, 1 << 18) else "cosets"
    if method == "table":
        table = ProductTable(S, max_level=max(lengths), cap=cap)
        from .group import IDENTITY

        return all(table.find_state(IDENTITY, j) is None for j in lengths)
    state = CosetSums(G.n, G.s, max(lengths))
    for g in S:
        state.add(g.eps, (g.k,))
    return not any(state.has_identity(j) for j in lengths)


# -- the search ----------------------------------------------------------------------


class _Exhausted(Exception):
    pass


class _Search:
    def __init__(
        self,
        G: GroupSpec,
        kind: str,
        budget: SearchBudget,
        keep_extremal: bool = True,
        stop_length: Optional[int] = None,
    ):
        self.G = G
        self.kind = kind
        self.budget = budget
        self.keep_extremal = keep_extremal
        self.order = G.order
        self.elements = G.elements()
        self.inv_bit = [1 << G.index(G.inverse(g)) for g in self.elements]
        self.perms = [p.__getitem__ for p in symmetry_perms(G) if list(p) != list(range(self.order))]
        self.cap_len = depth_cap(G, kind)
        self.lengths = avoided_lengths(G, kind, self.cap_len)
        self.dp_cap = max(self.lengths)
        self.n = G.n
        # nodes holding a product-one subsequence of this length are not expanded
        self.stop_length = stop_length
        self.stats = SearchStats()
        self.best = 0
        self.extremal: List[Tuple[int, ...]] = []
        self.t0 = 0.0

    def forbidden(self, state: CosetSums, length: int) -> int:
        """Flat-index mask of h with h in Pi_{j-1}(S) for some avoided j."""
        n = self.n
        mask = 0
        for j in self.lengths:
            k = j - 1
            if k > length:
                break
            if k == 0:
                mask |= 1  # identity
                continue
            m0, m1 = state.product_masks(k)
            mask |= m0 | (m1 << n)
        return mask

    def _tick(self) -> None:
        st = self.stats
        st.nodes += 1
        if st.nodes > self.budget.max_nodes:
            raise _Exhausted
        if st.nodes & 1023 == 0 and time.perf_counter() - self.t0 > self.budget.max_seconds:
            raise _Exhausted

    def visit(self, seq: Tuple[int, ...], state: CosetSums) -> None:
        self._tick()
        L = len(seq)
        if L > self.best:
            self.best = L
            self.extremal = []
        if L == self.best and self.keep_extremal:
            self.extremal.append(seq)
        if L >= self.cap_len:
            return
        if self.stop_length and L >= self.stop_length and state.has_identity(self.stop_length):
            self.stats.pruned_bound += 1
            return
        forb = self.forbidden(state, L)
        start = seq[-1] if seq else 0
        for i in range(start, self.order):
            if forb & self.inv_bit[i]:
                self.stats.pruned_avoidance += 1
                continue
            child = seq + (i,)
            if not _is_canonical(child, self.perms):
                self.stats.pruned_symmetry += 1
                continue
            g = self.elements[i]
            self.visit(child, state.extended(g.eps, (g.k,)))

    def run(self, prefix: Tuple[int, ...] = ()) -> bool:
        """Search the subtree at ``prefix``; returns False if the budget ran out."""
        self.t0 = time.perf_counter()
        state = CosetSums(self.G.n, self.G.s, self.dp_cap)
        for i in prefix:
            g = self.elements[i]
            state.add(g.eps, (g.k,))
        try:
            self.visit(prefix, state)
            done = True
        except _Exhausted:
            done = False
        self.stats.elapsed_ms = (time.perf_counter() - self.t0) * 1000
        return done


def _run_branch(args):
    G, kind, budget, prefix, keep, stop = args
    s = _Search(G, kind, budget, keep, stop)
    done = s.run(prefix)
    return done, s.best, s.extremal, s.stats


def _search(
    G: GroupSpec,
    kind: str,
    budget: SearchBudget,
    workers: int = 1,
    keep_extremal: bool = True,
    stop_length: Optional[int] = None,
):
    if workers <= 1:
        s = _Search(G, kind, budget, keep_extremal, stop_length)
        done = s.run()
        return done, s.best, s.extremal, s.stats
    # top-level canonical prefixes are independent subtrees
    probe = _Search(G, kind, budget, keep_extremal, stop_length)
    root = CosetSums(G.n, G.s, probe.dp_cap)
    forb = probe.forbidden(root, 0)
    prefixes = [
        (i,)
        for i in range(G.order)
        if not forb & probe.inv_bit[i] and _is_canonical((i,), probe.perms)
    ]
    stats = SearchStats(nodes=1)
    best, extremal, done = 0, [()], True
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for ok, b, ext, st in pool.map(_run_branch, [(G, kind, budget, p, keep_extremal, stop_length) for p in prefixes]):
            done &= ok
            stats.merge(st)
            if b > best:
                best, extremal = b, list(ext)
            elif b == best:
                extremal.extend(ext)
    extremal.sort()
    return done, best, extremal, stats


def lower_bound_sequence(G: GroupSpec) -> Optional[Sequence]:
    """y^[2n-1] . 1^[n-1] . x, which avoids |G|-product-one terms for n even."""
    from .group import Element, IDENTITY

    if G.rotations_only or G.n % 2:
        return None
    return Sequence.from_counts(G, {Element(0, 1): 2 * G.n - 1, IDENTITY: G.n - 1, Element(1, 0): 1})


def _disjoint_bound(G: GroupSpec, budget: SearchBudget, workers: int) -> Optional[Tuple[int, Sequence, int]]:
    """(stop_length, seed, s) enabling the two-disjoint-witnesses bound for E.

    If |G| = 2 exp(G) and T | S has an exp(G)-product-one subsequence R,
    an avoiding S satisfies |S| - exp(G) <= s(G) - 1 (otherwise S R^{-1}
    holds a second, disjoint one).  With a verified avoiding seed of length
    exp(G) + s(G) - 1, nodes containing such an R cannot lead past the seed.
    """
    ex = G.exponent()
    seed = lower_bound_sequence(G)
    if seed is None or G.order != 2 * ex:
        return None
    s_rep = compute_invariant(G, EGZ, budget, workers)
    if not s_rep.exhaustive:
        return None
    if len(seed) < ex + s_rep.value - 1 or not avoids(seed, GAO, method="cosets"):
        return None
    return ex, seed, s_rep.value


def compute_invariant(
    G: GroupSpec,
    kind: str,
    budget: Optional[SearchBudget] = None,
    workers: int = 1,
    verify: bool = True,
    disjoint_bound: bool = False,
) -> InvariantReport:
    """Value of ``kind`` for G by exhaustive search, with extremal sequences.

    ``disjoint_bound`` (kind gao only) first computes s(G) exhaustively and
    then skips nodes that already contain an exp(G)-product-one subsequence
    (see :func:`_disjoint_bound`); the value stays exact but the extremal
    list is then only partial.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown invariant kind {kind!r}")
    budget = budget or SearchBudget()
    bound = _disjoint_bound(G, budget, workers) if disjoint_bound and kind == GAO else None
    stop = bound[0] if bound else None
    done, best, extremal, stats = _search(G, kind, budget, workers, stop_length=stop)
    seqs = [Sequence.from_elements(G, [G.element(i) for i in seq]) for seq in extremal]
    notes: List[str] = []
    complete = done
    if bound is not None:
        _, seed, s_val = bound
        notes.append(f"disjoint-witness bound with exhaustive s = {s_val}")
        complete = False
        seed = canonicalize(G, seed)
        if len(seed) > best:
            best, seqs = len(seed), [seed]
        elif len(seed) == best and seed not in seqs:
            seqs.append(seed)
    report = InvariantReport(
        group=G,
        kind=kind,
        value=best if kind == DAVENPORT else best + 1,
        method=EXHAUSTIVE if done else BUDGET_EXHAUSTED,
        extremal=seqs,
        stats=stats,
        predicted=predicted(G, kind),
        extremal_complete=complete,
        notes=notes,
    )
    if verify and done:
        for S in seqs:
            if not avoids(S, kind, cap=budget.max_states):
                raise AssertionError(f"extremal sequence {S} fails its avoidance property")
    return report


def small_davenport(G: GroupSpec, budget: Optional[SearchBudget] = None, **kw) -> InvariantReport:
    return compute_invariant(G, DAVENPORT, budget, **kw)


def eta(G: GroupSpec, budget: Optional[SearchBudget] = None, **kw) -> InvariantReport:
    return compute_invariant(G, ETA, budget, **kw)


def egz_constant(G: GroupSpec, budget: Optional[SearchBudget] = None, **kw) -> InvariantReport:
    return compute_invariant(G, EGZ, budget, **kw)


def gao_constant(G: GroupSpec, budget: Optional[SearchBudget] = None, **kw) -> InvariantReport:
    return compute_invariant(G, GAO, budget, **kw)


def predicted_report(G: GroupSpec, kind: str) -> InvariantReport:
    value = predicted(G, kind)
    return InvariantReport(G, kind, value if isinstance(value, int) else -1, PREDICTED_ONLY, predicted=value)


@dataclass
class ExtremalResult:
    sequences: List[Sequence]
    complete: bool
    length: int


def enumerate_extremal(
    G: GroupSpec, kind: str, budget: Optional[SearchBudget] = None, workers: int = 1
) -> ExtremalResult:
    """Canonical avoiding sequences of maximal length, each verified."""
    report = compute_invariant(G, kind, budget, workers)
    return ExtremalResult(report.extremal, report.exhaustive, report.value - (kind != DAVENPORT))


def certify_maximal(S: Sequence, kind: str) -> bool:
    """S avoids, and appending any element of G breaks avoidance."""
    if not avoids(S, kind):
        return False
    return all(not avoids(S.appended(g), kind) for g in S.group.elements())


# -- relations between invariants ------------------------------------------------------


def check_relations(reports: Seq[InvariantReport]) -> List[Tuple[str, bool]]:
    """Chain d <= eta <= s <= E, the lower bounds s >= eta + exp - 1 and
    E >= d + |G|, and their equality forms, over exhaustive reports."""
    by: Dict[str, int] = {r.kind: r.value for r in reports if r.exhaustive}
    if not reports:
        return []
    G = reports[0].group
    ex, order = G.exponent(), G.order
    out: List[Tuple[str, bool]] = []
    chain = [k for k in KINDS if k in by]
    for a, b in zip(chain, chain[1:]):
        out.append((f"{a} <= {b}", by[a] <= by[b]))
    if ETA in by and EGZ in by:
        out.append(("s >= eta + exp - 1", by[EGZ] >= by[ETA] + ex - 1))
        out.append(("s = eta + exp - 1", by[EGZ] == by[ETA] + ex - 1))
    if DAVENPORT in by and GAO in by:
        out.append(("E >= d + |G|", by[GAO] >= by[DAVENPORT] + order))
        out.append(("E = d + |G|", by[GAO] == by[DAVENPORT] + order))
    return out
