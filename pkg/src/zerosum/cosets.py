"""Polynomial product-set engine for G_{n,s} based on coset signatures.

An ordered product of rotations y^{a_i} and reflections x y^{c_j} equals
x^{q mod 2} y^e with q the number of reflections and

    e = sum_i a_i * s^{r_i} + sum_j c_j * s^{r_j}

where r is the number of reflections standing to the right of a term.  Since
s^2 = 1 only the parity of r matters.  Reading the reflections right to left
their multipliers alternate 1, s, 1, s, ... so ceil(q/2) of them get 1 and
floor(q/2) get s, in any assignment we like.  A rotation can be put in any gap
between reflections, so when q >= 1 each rotation picks 1 or s freely; when
q = 0 it gets 1.

This turns "which elements are products of length-j subsequences" into an
abelian subset-sum DP with O(len * j^2) bitmask updates, independent of how
many distinct terms the sequence has.  Every term ("slot") may carry several
alternative exponents within one coset; plain sequences use singletons.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from .bits import bits_of, rotate, scale_perm

Slot = Tuple[int, Tuple[int, ...]]  # (eps, alternative exponents)


class CosetSums:
    """Reachable exponent sets of all subsequences, grouped by signature.

    ``plain[j]``: sums of j rotations with multiplier 1.
    ``twist[j]``: sums of j rotations, each multiplied by 1 or s.
    ``refl[u][w]``: sums of u + w reflections, u of them multiplied by s.
    Lengths are capped at ``cap``.
    """

    __slots__ = ("n", "s", "cap", "plain", "twist", "refl", "n_rot", "n_ref", "_neg")

    def __init__(self, n: int, s: int, cap: int):
        self.n, self.s, self.cap = n, s % n, cap
        self.plain = [1] + [0] * cap
        self.twist = [1] + [0] * cap
        hu, hw = cap // 2, (cap + 1) // 2
        self.refl = [[0] * (hw + 1) for _ in range(hu + 1)]
        self.refl[0][0] = 1
        self.n_rot = 0
        self.n_ref = 0
        self._neg = None

    def copy(self) -> "CosetSums":
        out = CosetSums.__new__(CosetSums)
        out.n, out.s, out.cap = self.n, self.s, self.cap
        out.plain = self.plain[:]
        out.twist = self.twist[:]
        out.refl = [row[:] for row in self.refl]
        out.n_rot, out.n_ref = self.n_rot, self.n_ref
        out._neg = self._neg
        return out

    def _shift_all(self, mask: int, exps: Sequence[int]) -> int:
        out = 0
        n = self.n
        for a in exps:
            out |= rotate(mask, a, n)
        return out

    def add(self, eps: int, exps: Sequence[int]) -> None:
        """Append one term (in place)."""
        n, s = self.n, self.s
        if eps == 0:
            scaled = tuple(sorted({a % n for a in exps} | {(a * s) % n for a in exps}))
            top = min(self.n_rot + 1, self.cap)
            plain, twist = self.plain, self.twist
            for j in range(top, 0, -1):
                if plain[j - 1]:
                    plain[j] |= self._shift_all(plain[j - 1], exps)
                if twist[j - 1]:
                    twist[j] |= self._shift_all(twist[j - 1], scaled)
            self.n_rot += 1
        else:
            scaled = [(c * s) % n for c in exps]
            refl = self.refl
            hu, hw = len(refl) - 1, len(refl[0]) - 1
            for u in range(hu, -1, -1):
                row = refl[u]
                prev = refl[u - 1] if u else None
                for w in range(hw, -1, -1):
                    if u + w == 0 or u + w > self.n_ref + 1:
                        continue
                    acc = row[w]
                    if w and row[w - 1]:
                        acc |= self._shift_all(row[w - 1], exps)
                    if prev is not None and prev[w]:
                        acc |= self._shift_all(prev[w], scaled)
                    row[w] = acc
            self.n_ref += 1

    def extended(self, eps: int, exps: Sequence[int]) -> "CosetSums":
        out = self.copy()
        out.add(eps, exps)
        return out

    # -- queries -----------------------------------------------------------

    def _negate(self, mask: int) -> int:
        if self._neg is None:
            self._neg = scale_perm(-1, self.n)
        return self._neg(mask)

    def _refl_entry(self, q: int) -> int:
        u, w = q // 2, q - q // 2
        if u >= len(self.refl) or w >= len(self.refl[0]):
            return 0
        return self.refl[u][w]

    def has_identity(self, j: int) -> bool:
        """True iff some length-j subsequence has 1 among its products."""
        if j < 1 or j > self.cap or j > self.n_rot + self.n_ref:
            return False
        if self.plain[j] & 1:
            return True
        for q in range(2, min(j, self.n_ref) + 1, 2):
            rest = j - q
            if rest > self.n_rot:
                continue
            r = self._refl_entry(q)
            if r and self.twist[rest] & self._negate(r):
                return True
        return False

    def product_masks(self, j: int) -> Tuple[int, int]:
        """Exponent masks (rotation coset, reflection coset) of Pi_j."""
        if j < 1 or j > self.cap:
            return 0, 0
        out = [self.plain[j], 0]
        for q in range(1, min(j, self.n_ref) + 1):
            rest = j - q
            if rest > self.n_rot:
                continue
            r = self._refl_entry(q)
            t = self.twist[rest]
            if not r or not t:
                continue
            acc = 0
            for b in bits_of(r):
                acc |= rotate(t, b, self.n)
            out[q & 1] |= acc
        return out[0], out[1]


def _run(n: int, s: int, slots: Sequence[Slot], cap: int) -> List[CosetSums]:
    states = [CosetSums(n, s, cap)]
    for eps, exps in slots:
        states.append(states[-1].extended(eps, exps))
    return states


def _back_rotations(
    states: List[CosetSums], slots: Sequence[Slot], j: int, e: int, twisted: bool
) -> List[Tuple[int, int, bool]]:
    n, s = states[0].n, states[0].s
    picked: List[Tuple[int, int, bool]] = []
    i = len(slots)
    while j:
        i -= 1
        eps, exps = slots[i]
        if eps:
            continue
        prev = states[i]
        table = prev.twist if twisted else prev.plain
        if table[j] >> e & 1:
            continue
        below = table[j - 1]
        for a in exps:
            if below >> ((e - a) % n) & 1:
                picked.append((i, a, False))
                e = (e - a) % n
                break
            if twisted and below >> ((e - a * s) % n) & 1:
                picked.append((i, a, True))
                e = (e - a * s) % n
                break
        else:  # pragma: no cover - DP invariant
            raise AssertionError("rotation backtrack lost its target")
        j -= 1
    return picked


def _back_reflections(
    states: List[CosetSums], slots: Sequence[Slot], q: int, e: int
) -> List[Tuple[int, int, bool]]:
    n, s = states[0].n, states[0].s
    u, w = q // 2, q - q // 2
    picked: List[Tuple[int, int, bool]] = []
    i = len(slots)
    while u + w:
        i -= 1
        eps, exps = slots[i]
        if not eps:
            continue
        prev = states[i].refl
        if prev[u][w] >> e & 1:
            continue
        for c in exps:
            if w and prev[u][w - 1] >> ((e - c) % n) & 1:
                picked.append((i, c, False))
                e, w = (e - c) % n, w - 1
                break
            if u and prev[u - 1][w] >> ((e - c * s) % n) & 1:
                picked.append((i, c, True))
                e, u = (e - c * s) % n, u - 1
                break
        else:  # pragma: no cover - DP invariant
            raise AssertionError("reflection backtrack lost its target")
    return picked


def _arrange(rots, refs) -> List[Tuple[int, int, int]]:
    """Order chosen terms so that each gets its recorded multiplier."""
    ones = [(i, c) for i, c, tw in refs if not tw]
    twos = [(i, c) for i, c, tw in refs if tw]
    q = len(refs)
    ref_order: List[Tuple[int, int]] = []
    for p in range(q):  # p = reflections to the right
        ref_order.append(ones.pop() if p % 2 == 0 else twos.pop())
    ref_order.reverse()
    tail = [(i, 0, a) for i, a, tw in rots if not tw]
    before_last = [(i, 0, a) for i, a, tw in rots if tw]
    out: List[Tuple[int, int, int]] = [(i, 1, c) for i, c in ref_order[:-1]]
    out.extend(before_last)
    if ref_order:
        i, c = ref_order[-1]
        out.append((i, 1, c))
    out.extend(tail)
    return out


def find_product(
    n: int, s: int, slots: Sequence[Slot], length: int, target: Tuple[int, int] = (0, 0)
) -> Optional[List[Tuple[int, int, int]]]:
    """Choose ``length`` slots and one alternative each, plus an ordering,
    whose product is ``target``.

    Returns the ordering as ``(slot_index, eps, exponent)`` triples, or None.
    """
    if length < 1 or length > len(slots):
        return None
    states = _run(n, s, slots, length)
    last = states[-1]
    t_eps, t_k = target[0], target[1] % n
    if t_eps == 0 and last.plain[length] >> t_k & 1:
        rots = _back_rotations(states, slots, length, t_k, twisted=False)
        return _arrange(rots, [])
    for q in range(2 if t_eps == 0 else 1, min(length, last.n_ref) + 1, 2):
        rest = length - q
        if rest > last.n_rot:
            continue
        r = last._refl_entry(q)
        t = last.twist[rest]
        if not r or not t:
            continue
        for b in bits_of(r):
            if t >> ((t_k - b) % n) & 1:
                refs = _back_reflections(states, slots, q, b)
                rots = _back_rotations(states, slots, rest, (t_k - b) % n, twisted=True)
                return _arrange(rots, refs)
    return None


def product_masks(n: int, s: int, slots: Sequence[Slot], length: int) -> Tuple[int, int]:
    return _run(n, s, slots, length)[-1].product_masks(length)


def length_profile(n: int, s: int, slots: Sequence[Slot], cap: int) -> Dict[int, Tuple[int, int]]:
    last = _run(n, s, slots, cap)[-1]
    return {j: last.product_masks(j) for j in range(1, min(cap, len(slots)) + 1)}
