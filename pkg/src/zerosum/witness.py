"""Constructive search for exp(G)- and |G|-product-one subsequences.

The main route mirrors the quotient argument: pick a normal subgroup H with
G/H cyclic or dihedral, peel off disjoint blocks whose projection is
product-one in G/H (so each block has products inside H), then solve a
zero-sum problem on the block products inside H.  Blocks keep every product
they can realise in H, not just one, which makes the H-level step strictly
stronger than using a single fixed product per block.  When that fails we try
the explicit rearrangements for the Klein quotient (n1 = 1), then bounded
term exchanges between blocks and the remainder, and finally the exact
coset DP over the whole sequence.
"""

from __future__ import annotations

import math
import random
from itertools import combinations
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence as Seq, Tuple, Union

from . import cosets
from .bits import bits_of
from .group import DIHEDRAL, PROPER, Element, GroupSpec, IDENTITY, make_cyclic
from .sequence import OrderedWitness, Sequence, _coset_witness, verify_witness
from .structure import Factorization, NotApplicableError, QuotientDesc, factorize, normal_subgroup

QUOTIENT_COMBINE = "quotient_combine"
FALLBACK_DP = "fallback_dp"

# finer-grained stage labels recorded in the trace
STAGE_DIRECT = "direct"
STAGE_CONGRUENCE = "congruence"
STAGE_EXCHANGE = "exchange"
STAGE_DP = "dp"

DEFAULT_EXCHANGE_CAP = 4000


class BelowThreshold(ValueError):
    """Raised by egz_cyclic when |S| < 2n - 1 and no witness exists."""


class NoDominantPair(ValueError):
    """A free sequence with no pair meeting the multiplicity bounds.

    Happens only for even n with k >= n/2 + 1 (e.g. 0^[5] 2^[2] 3 over C_6,
    k = 4), where the bounds as stated are too strong.
    """


# -- cyclic EGZ ---------------------------------------------------------------------


def zero_sum_positions(n: int, values: Seq[int], m: int, target: int = 0) -> Optional[List[int]]:
    """Positions of ``m`` values summing to ``target`` mod n, or None.

    DP over (#terms used, partial sum) with bitmask rows; the chosen
    positions are recovered by walking the rows backwards.
    """
    L = len(values)
    if m < 0 or m > L:
        return None
    full = (1 << n) - 1
    rows: List[List[int]] = [[1] + [0] * m]
    for v in values:
        prev = rows[-1]
        cur = prev[:]
        a = v % n
        for j in range(min(m, len(rows)), 0, -1):
            p = prev[j - 1]
            if p:
                cur[j] |= ((p << a) | (p >> (n - a))) & full if a else p
        rows.append(cur)
    t = target % n
    if not rows[-1][m] >> t & 1:
        return None
    picked: List[int] = []
    j = m
    for i in range(L, 0, -1):
        if not j:
            break
        if rows[i - 1][j] >> t & 1:
            continue
        picked.append(i - 1)
        t = (t - values[i - 1]) % n
        j -= 1
    picked.reverse()
    return picked


def _cyclic_values(S: Union[Sequence, Iterable[int]], n: int) -> List[int]:
    if isinstance(S, Sequence):
        if any(g.eps for g in S):
            raise ValueError("sequence is not inside the rotation subgroup")
        return [g.k % n for g in S]
    return [int(v) % n for v in S]


def egz_cyclic(n: int, S: Union[Sequence, Iterable[int]]) -> OrderedWitness:
    """An n-term zero-sum subsequence of S over C_n.

    S is either a Sequence inside <y> or a list of residues.  Sequences with
    at least 2n - 1 terms always have one; shorter inputs are searched anyway
    and raise BelowThreshold when no witness exists.
    """
    values = _cyclic_values(S, n)
    C = make_cyclic(n)
    pos = zero_sum_positions(n, values, n)
    if pos is None:
        if len(values) >= 2 * n - 1:  # pragma: no cover - EGZ theorem
            raise AssertionError("EGZ failed at or above 2n - 1")
        raise BelowThreshold(f"below EGZ threshold: {len(values)} < {2 * n - 1} terms and no witness")
    elems = tuple(Element(0, values[i]) for i in pos)
    w = OrderedWitness(elems, tuple(pos), C.product(elems))
    assert w.product == IDENTITY
    return w


def egz_cyclic_inverse_pair(
    n: int, S: Union[Sequence, Iterable[int]], k: int
) -> Optional[Tuple[int, int, int, int]]:
    """Dominant pair (a, b, v_a, v_b) of an n-product-one free S with
    |S| = 2n - k over C_n, or None when S is not n-product-one free.

    The pair satisfies min(v_a, v_b) >= n - 2k + 3, v_a + v_b >= 2n - 2k + 2
    and gcd(a - b, n) = 1.  Raises NoDominantPair if S is free but no pair
    qualifies (only seen for even n and k >= n/2 + 1).
    """
    if not 2 <= k <= n // 2 + 2:
        raise ValueError(f"k must lie in [2, {n // 2 + 2}], got {k}")
    values = _cyclic_values(S, n)
    if len(values) != 2 * n - k:
        raise ValueError(f"|S| must be 2n - k = {2 * n - k}, got {len(values)}")
    if zero_sum_positions(n, values, n) is not None:
        return None
    counts: Dict[int, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    lo, total = n - 2 * k + 3, 2 * n - 2 * k + 2
    for i, (a, va) in enumerate(ranked):
        for b, vb in ranked[i + 1 :]:
            if min(va, vb) >= lo and va + vb >= total and math.gcd(a - b, n) == 1:
                return a, b, va, vb
    raise NoDominantPair(f"free sequence over C_{n} with no pair meeting the bounds (k = {k}): {values}")


# -- commutation facts ----------------------------------------------------------------


def commutes(G: GroupSpec, a: Element, b: Element) -> bool:
    return G.mul(a, b) == G.mul(b, a)


def rotation_commutes_with_reflection(G: GroupSpec, alpha: int) -> bool:
    """y^alpha . y^beta x = y^beta x . y^alpha  iff  alpha (s - 1) = 0 mod n."""
    return (alpha * (G.s - 1)) % G.n == 0


def reflections_commute(G: GroupSpec, alpha: int, beta: int) -> bool:
    """y^alpha x . y^beta x = y^beta x . y^alpha x  iff  (alpha - beta)(s - 1) = 0 mod n."""
    return ((alpha - beta) * (G.s - 1)) % G.n == 0


# -- blocks ----------------------------------------------------------------------------


@dataclass
class Block:
    positions: Tuple[int, ...]  # into the source's expanded term list
    witness: OrderedWitness  # ordering whose product is ``h``
    h: Element
    h_options: Tuple[Element, ...]  # every product of the block lying in H

    def to_json(self) -> dict:
        return {
            "positions": list(self.positions),
            "h": str(self.h),
            "h_options": [str(e) for e in self.h_options],
        }


@dataclass
class BlockDecomposition:
    quotient: QuotientDesc
    block_len: int
    blocks: List[Block]
    remainder: Tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "quotient": self.quotient.to_json(),
            "block_len": self.block_len,
            "blocks": [b.to_json() for b in self.blocks],
            "remainder": list(self.remainder),
        }


def _ordering_for(G: GroupSpec, terms: Seq[Element], target: Element) -> Optional[List[int]]:
    found = cosets.find_product(G.n, G.s, [(g.eps, (g.k,)) for g in terms], len(terms), (target.eps, target.k))
    if found is None:
        return None
    return [i for i, _, _ in found]


def _h_options(q: QuotientDesc, terms: Seq[Element]) -> Tuple[Element, ...]:
    G = q.group
    m0, m1 = cosets.product_masks(G.n, G.s, [(g.eps, (g.k,)) for g in terms], len(terms))
    out = [Element(0, k) for k in bits_of(m0)] + [Element(1, k) for k in bits_of(m1)]
    return tuple(h for h in out if h in q.elements)


def _make_block(q: QuotientDesc, terms: List[Element], positions: Seq[int], order: Seq[int]) -> Block:
    G = q.group
    elems = tuple(terms[i] for i in order)
    h = G.product(elems)
    if h not in q.elements:  # pragma: no cover - homomorphism property
        raise AssertionError("block product left H")
    w = OrderedWitness(elems, tuple(positions[i] for i in order), h)
    return Block(tuple(sorted(positions)), w, h, _h_options(q, terms))


def _find_block(q: QuotientDesc, terms: Seq[Element], block_len: int) -> Optional[List[int]]:
    """Indices (in product order) of ``block_len`` terms that are product-one in G/H."""
    Q = q.quotient
    proj = [q.project(g) for g in terms]
    if Q.rotations_only:
        return zero_sum_positions(Q.n, [p.k for p in proj], block_len)
    found = cosets.find_product(Q.n, Q.s, [(p.eps, (p.k,)) for p in proj], block_len)
    if found is None:
        return None
    return [i for i, _, _ in found]


def quotient_egz_constant(q: QuotientDesc) -> int:
    """s(G/H) for the quotients that occur: 2m - 1 for C_m, 5 for the Klein
    group, 2m or 3m (m even / odd) for D_2m."""
    Q = q.quotient
    m = Q.n
    if Q.rotations_only:
        return 2 * m - 1
    if q.quotient_kind == "Klein":
        return 5
    return 2 * m if m % 2 == 0 else 3 * m


def block_decompose(
    G: GroupSpec,
    q: QuotientDesc,
    S: Sequence,
    block_len: Optional[int] = None,
    max_blocks: Optional[int] = None,
    stop_below: Optional[int] = None,
) -> BlockDecomposition:
    """Greedy first-fit extraction of disjoint blocks with products in H.

    Terms are scanned in the sequence's canonical order.  Extraction goes on
    while at least ``stop_below`` terms remain (default: the quotient's EGZ
    constant, so a block is guaranteed to exist) and a block is found, up to
    ``max_blocks`` blocks.  Pass ``stop_below=block_len`` to keep extracting
    as long as the quotient still allows it.
    """
    if q.group != G or S.group != G:
        raise ValueError("quotient and sequence must live over G")
    block_len = block_len or q.quotient.exponent()
    floor = max(block_len, quotient_egz_constant(q) if stop_below is None else stop_below)
    terms = list(S)
    remaining = list(range(len(terms)))
    blocks: List[Block] = []
    while len(remaining) >= floor and (max_blocks is None or len(blocks) < max_blocks):
        sub = [terms[i] for i in remaining]
        pick = _find_block(q, sub, block_len)
        if pick is None:
            break
        positions = [remaining[i] for i in pick]
        block_terms = [terms[p] for p in positions]
        blocks.append(_make_block(q, block_terms, positions, list(range(block_len))))
        taken = set(positions)
        remaining = [i for i in remaining if i not in taken]
    return BlockDecomposition(q, block_len, blocks, tuple(remaining))


# -- choosing the quotient ----------------------------------------------------------------


@dataclass(frozen=True)
class Plan:
    quotient: QuotientDesc
    block_len: int
    label: str  # which branch of the argument applies


def plan_for(G: GroupSpec) -> Optional[Plan]:
    """Quotient used by the block strategy, or None outside theorem range."""
    if G.s_class != PROPER or G.n < 8:
        return None
    fact = factorize(G.n, G.s)
    n1, n2, h = fact.n1, fact.n2, fact.h
    if G.n % 2:
        if h != 1:  # pragma: no cover - odd n never carries a factor 2
            return None
        q = normal_subgroup(G, fact, "c")
        return Plan(q, n2, "odd")
    if n1 % 2 == 0:
        q = normal_subgroup(G, fact, "a")
        return Plan(q, n1, "even-n1")
    if n2 % 2 == 0:
        q = normal_subgroup(G, fact, "b")
        label = "klein" if n1 == 1 else "even-n2"
        return Plan(q, 2 * n1, label)
    # n = 2 n1 n2 with n1, n2 odd: the lone 2 can join n1 (s is odd)
    merged = Factorization(2 * n1, n2, 1, fact.case)
    q = normal_subgroup(G, merged, "a")
    return Plan(q, 2 * n1, "even-n1")


# -- the H-level step ----------------------------------------------------------------------


def _combine_blocks(q: QuotientDesc, blocks: Seq[Block], count: int) -> Optional[List[Element]]:
    """Pick ``count`` blocks and one H-product each with total product 1;
    return the full ordered term list, or None."""
    if count > len(blocks):
        return None
    model = q.h_model
    slots: List[cosets.Slot] = []
    for b in blocks:
        emb = [q.h_embed(h) for h in b.h_options]
        eps = emb[0].eps
        slots.append((eps, tuple(sorted({e.k for e in emb}))))
    found = cosets.find_product(model.n, model.s, slots, count)
    if found is None:
        return None
    G = q.group
    out: List[Element] = []
    for i, eps, k in found:
        h = q.h_lift(Element(eps, k))
        terms = list(blocks[i].witness.elements)
        order = _ordering_for(G, terms, h)
        if order is None:  # pragma: no cover - h was listed as an option
            raise AssertionError("block cannot realise its listed product")
        out.extend(terms[j] for j in order)
    return out


def _klein_congruence(G: GroupSpec, blocks: Seq[Block], rest: Seq[Element], target_len: int) -> Optional[List[Element]]:
    """n1 = 1, quotient C_2 x C_2: the four leftover terms are one from each
    class y^{2a}, y^{2b+1}, y^{2c}x, y^{2d+1}x.  Try the two interleavings
    r0 r1 (A)^k c2 (B)^m c3 and r0 r1 (A)^k c3 (B)^m c2 with
    k + m = n/2 - 2 blocks, enumerating k."""
    if len(rest) != 4:
        return None
    cls = {(g.eps, g.k % 2): g for g in rest}
    if len(cls) != 4:
        return None
    r0, r1, c2, c3 = cls[(0, 0)], cls[(0, 1)], cls[(1, 0)], cls[(1, 1)]
    need = (target_len - 4) // 2
    by_h: Dict[Element, List[Block]] = {}
    for b in blocks:
        for h in b.h_options:
            by_h.setdefault(h, []).append(b)
    hs = sorted(by_h)
    for A in hs:
        for B in hs:
            for k in range(need + 1):
                m = need - k
                picked_a = by_h[A][:k]
                used = {id(b) for b in picked_a}
                picked_b = [b for b in by_h[B] if id(b) not in used][:m]
                if len(picked_a) < k or len(picked_b) < m:
                    continue
                for mid, last in ((c2, c3), (c3, c2)):
                    prod = G.product([r0, r1] + [A] * k + [mid] + [B] * m + [last])
                    if prod != IDENTITY:
                        continue
                    out = [r0, r1]
                    for b, h in [(b, A) for b in picked_a]:
                        terms = list(b.witness.elements)
                        out.extend(terms[j] for j in _ordering_for(G, terms, h))
                    out.append(mid)
                    for b in picked_b:
                        terms = list(b.witness.elements)
                        out.extend(terms[j] for j in _ordering_for(G, terms, B))
                    out.append(last)
                    return out
    return None


# -- outcome ---------------------------------------------------------------------------------


@dataclass
class FinderOutcome:
    witness: Optional[OrderedWitness]
    strategy: str
    target_len: int
    stage: str = ""
    trace: Optional[BlockDecomposition] = None
    exchanges_tried: int = 0

    @property
    def found(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "strategy": self.strategy,
            "stage": self.stage,
            "target_len": self.target_len,
            "exchanges_tried": self.exchanges_tried,
            "witness": self.witness.to_json() if self.witness else None,
            "blocks": self.trace.to_json() if self.trace else None,
        }


def _finish(S: Sequence, ordered: List[Element], target_len: int) -> OrderedWitness:
    from .sequence import witness_from_elements

    w = witness_from_elements(S, ordered)
    if len(w) != target_len or w.product != IDENTITY or not verify_witness(S, w):
        raise AssertionError("constructed witness failed verification")
    return w


def _quotient_attempt(
    G: GroupSpec, plan: Plan, S: Sequence, target_len: int, exchange_cap: int
) -> Tuple[Optional[List[Element]], str, Optional[BlockDecomposition], int]:
    q, L = plan.quotient, plan.block_len
    if target_len % L:
        return None, "", None, 0
    count = target_len // L
    dec = block_decompose(G, q, S, L, stop_below=L)
    terms = list(S)
    got = _combine_blocks(q, dec.blocks, count)
    if got is not None:
        return got, STAGE_DIRECT, dec, 0
    rest = [terms[i] for i in dec.remainder]
    if plan.label == "klein":
        got = _klein_congruence(G, dec.blocks, rest, target_len)
        if got is not None:
            return got, STAGE_CONGRUENCE, dec, 0
    # single, then pair, swaps between one block and the remainder
    tried = 0
    for width in (1, 2):
        for bi, b in enumerate(dec.blocks):
            for outs in combinations(range(len(b.positions)), width):
                for ins in combinations(dec.remainder, width):
                    if tried >= exchange_cap:
                        return None, "", dec, tried
                    tried += 1
                    new_pos = list(b.positions)
                    for o, r in zip(outs, ins):
                        new_pos[o] = r
                    new_terms = [terms[i] for i in new_pos]
                    order = _find_block(q, new_terms, L)
                    if order is None:
                        continue
                    blocks = list(dec.blocks)
                    blocks[bi] = _make_block(q, new_terms, new_pos, order)
                    left = [i for i in dec.remainder if i not in ins] + [b.positions[o] for o in outs]
                    left.sort(key=lambda i: terms[i])
                    more = block_decompose(G, q, Sequence.from_elements(G, [terms[i] for i in left]), L, stop_below=L)
                    extra = [
                        Block(tuple(left[i] for i in x.positions), x.witness, x.h, x.h_options)
                        for x in more.blocks
                    ]
                    got = _combine_blocks(q, blocks + extra, count)
                    if got is not None:
                        return got, STAGE_EXCHANGE, dec, tried
    return None, "", dec, tried


def find_exp_product_one(
    G: GroupSpec,
    S: Sequence,
    target_len: Optional[int] = None,
    exchange_cap: int = DEFAULT_EXCHANGE_CAP,
    allow_fallback: bool = True,
) -> FinderOutcome:
    """A verified product-one subsequence of S with ``target_len`` terms.

    ``target_len`` defaults to exp(G); |G| is also accepted (for n even
    it is assembled from two disjoint exp(G)-witnesses when possible).
    Returns an outcome with ``witness=None`` only when no such subsequence
    exists (confirmed by the exact DP) or the fallback was disabled.
    """
    if S.group != G:
        raise ValueError("sequence is not over G")
    target_len = target_len or G.exponent()
    if target_len < 1:
        raise ValueError("target length must be positive")
    if target_len > len(S):
        return FinderOutcome(None, FALLBACK_DP, target_len, STAGE_DP)
    plan = plan_for(G)
    if plan is not None and target_len == G.order and G.exponent() == G.n:
        pair = find_two_disjoint(G, S, exchange_cap=exchange_cap, allow_fallback=False)
        if pair is not None:
            a, b = pair
            ordered = list(a.witness.elements) + list(b.witness.elements)
            return FinderOutcome(_finish(S, ordered, target_len), QUOTIENT_COMBINE, target_len, a.stage)
    elif plan is not None:
        got, stage, dec, tried = _quotient_attempt(G, plan, S, target_len, exchange_cap)
        if got is not None:
            return FinderOutcome(_finish(S, got, target_len), QUOTIENT_COMBINE, target_len, stage, dec, tried)
    if not allow_fallback:
        return FinderOutcome(None, QUOTIENT_COMBINE, target_len)
    w = _coset_witness(S, target_len)
    return FinderOutcome(w, FALLBACK_DP, target_len, STAGE_DP)


def find_two_disjoint(
    G: GroupSpec, S: Sequence, exchange_cap: int = DEFAULT_EXCHANGE_CAP, allow_fallback: bool = True
) -> Optional[Tuple[FinderOutcome, FinderOutcome]]:
    """Two disjoint n-term product-one subsequences (n even, |S| >= 3n)."""
    n = G.n
    first = find_exp_product_one(G, S, n, exchange_cap, allow_fallback)
    if not first.found:
        return None
    rest = S.remove(first.witness.as_sequence(G))
    second = find_exp_product_one(G, rest, n, exchange_cap, allow_fallback)
    if not second.found:
        return None
    # positions of ``second`` refer to S with the first witness removed
    return first, second


# -- random inputs and campaigns ---------------------------------------------------------------


def random_sequence(G: GroupSpec, length: int, rng: random.Random) -> Sequence:
    elems = G.elements()
    return Sequence.from_elements(G, [elems[rng.randrange(len(elems))] for _ in range(length)])


@dataclass
class FuzzReport:
    n: int
    s: int
    length: int
    target_len: int
    count: int
    seed: int
    successes: int = 0
    failures: List[str] = field(default_factory=list)
    strategies: Dict[str, int] = field(default_factory=dict)
    stages: Dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "s": self.s,
            "length": self.length,
            "target_len": self.target_len,
            "count": self.count,
            "seed": self.seed,
            "successes": self.successes,
            "failures": self.failures,
            "strategies": self.strategies,
            "stages": self.stages,
        }


def fuzz(G: GroupSpec, length: int, target_len: int, count: int, seed: int = 0) -> FuzzReport:
    """Run the finder on ``count`` seeded random sequences; every witness is
    re-verified independently of the finder."""
    rng = random.Random(seed)
    rep = FuzzReport(G.n, G.s, length, target_len, count, seed)
    for _ in range(count):
        S = random_sequence(G, length, rng)
        out = find_exp_product_one(G, S, target_len)
        ok = (
            out.found
            and len(out.witness) == target_len
            and G.product(out.witness.elements) == IDENTITY
            and verify_witness(S, out.witness)
        )
        if ok:
            rep.successes += 1
            rep.strategies[out.strategy] = rep.strategies.get(out.strategy, 0) + 1
            rep.stages[out.stage] = rep.stages.get(out.stage, 0) + 1
        else:
            rep.failures.append(str(S))
    return rep
