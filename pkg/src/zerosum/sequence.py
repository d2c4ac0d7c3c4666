"""Sequences (finite multisets) over G_{n,s} and their product sets.

Two independent engines compute the set of ordered products of subsequences:

* :class:`ProductTable` -- DP over multiplicity vectors of the distinct terms;
  exact for any group but the state count is the product of (v_i + 1).
* :mod:`zerosum.cosets` -- polynomial DP valid for G_{n,s} specifically.

:func:`naive_pi` enumerates permutations and serves as the oracle for both.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence as Seq, Tuple

from . import cosets
from .bits import MaskPerm, bits_of
from .group import IDENTITY, Element, GroupSpec, format_element, parse_element

DEFAULT_STATE_CAP = 1 << 26
NAIVE_MAX_LEN = 8


class BudgetExceeded(RuntimeError):
    def __init__(self, states: int, cap: int):
        super().__init__(f"product table needs {states} states, cap is {cap}")
        self.states = states
        self.cap = cap


class SequenceSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


@dataclass(frozen=True)
class Sequence:
    """A multiset of group elements, stored as sorted (element, multiplicity)."""

    group: GroupSpec
    terms: Tuple[Tuple[Element, int], ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for g, m in self.terms:
            if m < 1:
                raise ValueError(f"multiplicity of {format_element(g)} must be positive")
            if g in seen:
                raise ValueError(f"duplicate term {format_element(g)}")
            if not self.group.contains(g):
                raise ValueError(f"{g} is not an element of {self.group.label()}")
            seen.add(g)
        if list(self.terms) != sorted(self.terms):
            object.__setattr__(self, "terms", tuple(sorted(self.terms)))

    @classmethod
    def from_counts(cls, group: GroupSpec, counts: Dict[Element, int]) -> "Sequence":
        return cls(group, tuple(sorted((g, m) for g, m in counts.items() if m > 0)))

    @classmethod
    def from_elements(cls, group: GroupSpec, items: Iterable[Element]) -> "Sequence":
        counts: Dict[Element, int] = {}
        for g in items:
            g = group.elem(g[0], g[1])
            counts[g] = counts.get(g, 0) + 1
        return cls.from_counts(group, counts)

    def __len__(self) -> int:
        return sum(m for _, m in self.terms)

    def __iter__(self) -> Iterator[Element]:
        for g, m in self.terms:
            for _ in range(m):
                yield g

    def __str__(self) -> str:
        return format_sequence(self)

    def counts(self) -> Dict[Element, int]:
        return dict(self.terms)

    def multiplicity(self, g: Element) -> int:
        return self.counts().get(g, 0)

    def elements(self) -> List[Element]:
        return list(self)

    def distinct(self) -> List[Element]:
        return [g for g, _ in self.terms]

    def __add__(self, other: "Sequence") -> "Sequence":
        counts = self.counts()
        for g, m in other.terms:
            counts[g] = counts.get(g, 0) + m
        return Sequence.from_counts(self.group, counts)

    def appended(self, g: Element, times: int = 1) -> "Sequence":
        counts = self.counts()
        counts[g] = counts.get(g, 0) + times
        return Sequence.from_counts(self.group, counts)

    def divides(self, other: "Sequence") -> bool:
        """T.divides(S) iff T | S."""
        big = other.counts()
        return all(big.get(g, 0) >= m for g, m in self.terms)

    def remove(self, other: "Sequence") -> "Sequence":
        """S . T^[-1]; requires T | S."""
        if not other.divides(self):
            raise ValueError("not a subsequence")
        counts = self.counts()
        for g, m in other.terms:
            counts[g] -= m
        return Sequence.from_counts(self.group, counts)

    def restrict(self, keep) -> "Sequence":
        """S intersected with the subset selected by predicate ``keep``."""
        return Sequence(self.group, tuple((g, m) for g, m in self.terms if keep(g)))

    def map(self, group: GroupSpec, f) -> "Sequence":
        return Sequence.from_elements(group, (f(g) for g in self))

    def to_json(self) -> List[dict]:
        return [{"elem": {"eps": g.eps, "k": g.k}, "mult": m} for g, m in self.terms]

    @classmethod
    def from_json(cls, group: GroupSpec, data: List[dict]) -> "Sequence":
        counts: Dict[Element, int] = {}
        for item in data:
            g = group.elem(item["elem"]["eps"], item["elem"]["k"])
            counts[g] = counts.get(g, 0) + int(item["mult"])
        return cls.from_counts(group, counts)


@dataclass(frozen=True)
class OrderedWitness:
    """Ordered elements whose left-to-right product is ``product``.

    ``positions`` index into ``list(source)``, the expanded sorted terms.
    """

    elements: Tuple[Element, ...]
    positions: Tuple[int, ...]
    product: Element

    def __len__(self) -> int:
        return len(self.elements)

    def as_sequence(self, group: GroupSpec) -> Sequence:
        return Sequence.from_elements(group, self.elements)

    def to_json(self) -> dict:
        return {
            "elements": [{"eps": g.eps, "k": g.k} for g in self.elements],
            "positions": list(self.positions),
            "product": {"eps": self.product.eps, "k": self.product.k},
            "text": " * ".join(format_element(g) for g in self.elements),
        }


def verify_witness(source: Sequence, w: OrderedWitness) -> bool:
    G = source.group
    if G.product(w.elements) != w.product:
        return False
    flat = source.elements()
    if len(set(w.positions)) != len(w.positions) or len(w.positions) != len(w.elements):
        return False
    return all(0 <= p < len(flat) and flat[p] == g for p, g in zip(w.positions, w.elements))


def witness_from_elements(source: Sequence, ordered: Seq[Element]) -> OrderedWitness:
    """Attach source positions to an ordering drawn from ``source``."""
    flat = source.elements()
    free: Dict[Element, List[int]] = {}
    for i, g in enumerate(flat):
        free.setdefault(g, []).append(i)
    positions = []
    for g in ordered:
        slots = free.get(g)
        if not slots:
            raise ValueError(f"{format_element(g)} is not available in the source sequence")
        positions.append(slots.pop(0))
    w = OrderedWitness(tuple(ordered), tuple(positions), source.group.product(ordered))
    assert verify_witness(source, w)
    return w


# -- text grammar ----------------------------------------------------------------

_TERM = re.compile(r"(1|x\*y\^-?\d+|x|y\^-?\d+)(?:\^\[(\d+)\])?")


def parse_sequence(text: str, G: GroupSpec) -> Sequence:
    """Parse ``term (" . " term)*`` with ``term := atom ("^[" m "]")?``."""
    body = text.strip()
    counts: Dict[Element, int] = {}
    pos = 0
    while body:
        m = _TERM.match(body, pos)
        if not m:
            raise SequenceSyntaxError("expected a term", pos)
        mult = int(m.group(2)) if m.group(2) is not None else 1
        if mult == 0:
            raise SequenceSyntaxError("multiplicity 0 is not allowed", m.start(2))
        g = parse_element(m.group(1), G)
        counts[g] = counts.get(g, 0) + mult
        pos = m.end()
        if pos == len(body):
            break
        if not body.startswith(" . ", pos):
            raise SequenceSyntaxError("expected ' . ' between terms", pos)
        pos += 3
    return Sequence.from_counts(G, counts)


def format_sequence(S: Sequence) -> str:
    return " . ".join(
        format_element(g) if m == 1 else f"{format_element(g)}^[{m}]" for g, m in S.terms
    )


# -- product table -----------------------------------------------------------------


def right_mult_perm(G: GroupSpec, g: Element) -> MaskPerm:
    """Permutation of flat indices h -> h * g."""
    return MaskPerm([G.index(G.mul(G.element(i), g)) for i in range(G.order)])


class ProductTable:
    """Reachable ordered products for every submultiset of ``base``.

    States are multiplicity vectors ``m`` with ``0 <= m_i <= v_i`` over the
    distinct terms, addressed in mixed radix.  ``masks[idx]`` is a bitmask over
    flat element indices.  Only states with ``|m| <= max_level`` are filled.
    """

    def __init__(self, base: Sequence, max_level: Optional[int] = None, cap: int = DEFAULT_STATE_CAP):
        self.base = base
        self.group = G = base.group
        self.distinct = base.distinct()
        self.caps = [m for _, m in base.terms]
        self.strides: List[int] = []
        total = 1
        for v in self.caps:
            self.strides.append(total)
            total *= v + 1
        if total > cap:
            raise BudgetExceeded(total, cap)
        self.size = total
        self.max_level = len(base) if max_level is None else max_level
        self._perms = [right_mult_perm(G, g) for g in self.distinct]
        self._inv = [G.inverse(g) for g in self.distinct]
        self.masks = self._build()

    def _build(self) -> List[int]:
        masks = [0] * self.size
        masks[0] = 1 << self.group.index(IDENTITY)
        digits = [0] * len(self.caps)
        level = 0
        perms, strides, caps = self._perms, self.strides, self.caps
        for idx in range(1, self.size):
            # mixed-radix increment
            i = 0
            while digits[i] == caps[i]:
                level -= digits[i]
                digits[i] = 0
                i += 1
            digits[i] += 1
            level += 1
            if level > self.max_level:
                continue
            acc = 0
            for t, d in enumerate(digits):
                if d:
                    prev = masks[idx - strides[t]]
                    if prev:
                        acc |= perms[t](prev)
            masks[idx] = acc
        return masks

    # -- addressing ------------------------------------------------------

    def state_index(self, m: Seq[int]) -> int:
        if len(m) != len(self.caps) or any(not 0 <= d <= c for d, c in zip(m, self.caps)):
            raise ValueError(f"{tuple(m)} is not a submultiset state")
        return sum(d * st for d, st in zip(m, self.strides))

    def state_vector(self, idx: int) -> Tuple[int, ...]:
        out = []
        for c in self.caps:
            idx, d = divmod(idx, c + 1)
            out.append(d)
        return tuple(out)

    def states(self, level: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
        for m in itertools.product(*(range(c + 1) for c in self.caps)):
            if level is None or sum(m) == level:
                yield m

    # -- queries ---------------------------------------------------------

    def _to_set(self, mask: int) -> frozenset:
        G = self.group
        return frozenset(G.element(i) for i in bits_of(mask))

    def reachable(self, m: Seq[int]) -> frozenset:
        if sum(m) > self.max_level:
            raise ValueError(f"level {sum(m)} above table max_level {self.max_level}")
        return self._to_set(self.masks[self.state_index(m)])

    def pi(self, m: Optional[Seq[int]] = None) -> frozenset:
        """pi(T) for the submultiset T = m (default: the whole base)."""
        if m is None:
            m = self.caps
        if sum(m) == 0:
            raise ValueError("pi of the empty sequence is undefined")
        return self.reachable(m)

    def subproducts(self) -> frozenset:
        """Pi(S): union of pi(T) over nonempty T | S."""
        return self._to_set(self._union(lambda lvl: 1 <= lvl))

    def n_subproducts(self, k: int) -> frozenset:
        """Pi_k(S)."""
        return self._to_set(self._union(lambda lvl: lvl == k))

    def _union(self, want) -> int:
        acc = 0
        for m in self.states():
            lvl = sum(m)
            if lvl <= self.max_level and want(lvl):
                acc |= self.masks[self.state_index(m)]
        return acc

    def find_state(self, target: Element, level: int) -> Optional[Tuple[int, ...]]:
        """First state (mixed-radix order) at ``level`` reaching ``target``."""
        bit = 1 << self.group.index(target)
        for m in self.states(level):
            if self.masks[self.state_index(m)] & bit:
                return m
        return None


def extract_witness(table: ProductTable, target: Element, level: Seq[int]) -> OrderedWitness:
    """Recover an ordering of submultiset ``level`` whose product is ``target``.

    Walks back-pointers "last factor = lowest term index i with
    target * g_i^{-1} reachable from level - e_i".
    """
    G = table.group
    m = list(level)
    if sum(m) == 0 or target not in table.reachable(m):
        raise ValueError(f"{format_element(target)} is not reachable at level {tuple(level)}")
    rev: List[Element] = []
    cur = target
    while sum(m):
        for i, d in enumerate(m):
            if not d:
                continue
            prev = G.mul(cur, table._inv[i])
            m[i] -= 1
            if table.masks[table.state_index(m)] >> G.index(prev) & 1:
                rev.append(table.distinct[i])
                cur = prev
                break
            m[i] += 1
        else:  # pragma: no cover - DP invariant
            raise AssertionError("back-pointer walk failed")
    w = witness_from_elements(table.base, rev[::-1])
    if w.product != target:  # pragma: no cover
        raise AssertionError("extracted witness does not re-multiply to target")
    return w


def naive_pi(S: Sequence) -> frozenset:
    """Products over all orderings of S, by explicit permutation enumeration."""
    if len(S) > NAIVE_MAX_LEN:
        raise ValueError(f"naive_pi is limited to {NAIVE_MAX_LEN} terms, got {len(S)}")
    if not len(S):
        return frozenset()
    G = S.group
    return frozenset(G.product(p) for p in set(itertools.permutations(S.elements())))


def naive_subproducts(S: Sequence, k: Optional[int] = None) -> frozenset:
    """Pi(S) (or Pi_k(S)) by enumerating sub-multisets and permutations."""
    out = set()
    counts = S.terms
    for m in itertools.product(*(range(c + 1) for _, c in counts)):
        size = sum(m)
        if size == 0 or (k is not None and size != k):
            continue
        T = Sequence(S.group, tuple((g, d) for (g, _), d in zip(counts, m) if d))
        out |= naive_pi(T)
    return frozenset(out)


# -- product-one queries -------------------------------------------------------------


def _slots(S: Sequence) -> List[cosets.Slot]:
    return [(g.eps, (g.k,)) for g in S]


def _coset_witness(S: Sequence, k: int, target: Element = IDENTITY) -> Optional[OrderedWitness]:
    G = S.group
    found = cosets.find_product(G.n, G.s, _slots(S), k, target)
    if found is None:
        return None
    elements = [G.elem(e, c) for _, e, c in found]
    positions = tuple(i for i, _, _ in found)
    w = OrderedWitness(tuple(elements), positions, G.product(elements))
    if w.product != target or not verify_witness(S, w):  # pragma: no cover
        raise AssertionError("coset witness failed verification")
    return w


def has_product_one_of_length(
    S: Sequence, k: int, method: str = "table", cap: int = DEFAULT_STATE_CAP
) -> Optional[OrderedWitness]:
    """A verified witness T | S with |T| = k and 1 in pi(T), or None.

    ``method="table"`` uses :class:`ProductTable` (raises BudgetExceeded past
    ``cap``); ``method="cosets"`` uses the polynomial coset engine.
    """
    if not 0 < k <= len(S):
        if k <= 0:
            raise ValueError(f"length must be positive, got {k}")
        return None
    if method == "cosets":
        return _coset_witness(S, k)
    if method != "table":
        raise ValueError(f"unknown method {method!r}")
    table = ProductTable(S, max_level=k, cap=cap)
    m = table.find_state(IDENTITY, k)
    if m is None:
        return None
    return extract_witness(table, IDENTITY, m)


def has_short_product_one(
    S: Sequence, bound: int, method: str = "table", cap: int = DEFAULT_STATE_CAP
) -> Optional[OrderedWitness]:
    """Shortest product-one subsequence of length in [1, bound], or None."""
    top = min(bound, len(S))
    if method == "cosets":
        for k in range(1, top + 1):
            w = _coset_witness(S, k)
            if w is not None:
                return w
        return None
    if top < 1:
        return None
    table = ProductTable(S, max_level=top, cap=cap)
    for k in range(1, top + 1):
        m = table.find_state(IDENTITY, k)
        if m is not None:
            return extract_witness(table, IDENTITY, m)
    return None


def is_product_one_free(S: Sequence, method: str = "table", cap: int = DEFAULT_STATE_CAP) -> bool:
    return has_short_product_one(S, len(S), method=method, cap=cap) is None


def product_set(S: Sequence, k: Optional[int] = None, method: str = "table") -> frozenset:
    """pi(S) when k is None, else Pi_k(S)."""
    G = S.group
    if method == "cosets":
        j = len(S) if k is None else k  # pi(S) = Pi_{|S|}(S)
        m0, m1 = cosets.product_masks(G.n, G.s, _slots(S), j)
        return frozenset([G.elem(0, i) for i in bits_of(m0)] + [G.elem(1, i) for i in bits_of(m1)])
    table = ProductTable(S)
    return table.pi() if k is None else table.n_subproducts(k)
