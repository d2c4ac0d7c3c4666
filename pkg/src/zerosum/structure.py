"""Factorisation of (n, s), normal subgroups and quotients, generating pairs,
automorphisms, and the extremal sequence families with their classifiers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple

from .group import (
    IDENTITY,
    PROPER,
    Element,
    GroupSpec,
    format_element,
    make_cyclic,
    make_dihedral,
)
from .sequence import Sequence


class NotApplicableError(ValueError):
    """A construction was requested outside its hypotheses."""


# -- factorisation -------------------------------------------------------------


@dataclass(frozen=True)
class Factorization:
    n1: int
    n2: int
    h: int
    case: str  # "a": n1, n2 >= 3; "b": {n1, n2} = {1, n/2}

    def to_json(self) -> dict:
        return {"n1": self.n1, "n2": self.n2, "h": self.h}


def prime_powers(n: int) -> List[Tuple[int, int]]:
    """[(p, p^e), ...] for the prime factorisation of n."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            q = 1
            while n % p == 0:
                n //= p
                q *= p
            out.append((p, q))
        p += 1
    if n > 1:
        out.append((n, n))
    return out


def factorize(n: int, s: int) -> Factorization:
    """Split n = h * n1 * n2 with s = -1 mod n1, s = 1 mod n2, gcd(n1, n2) = 1."""
    s %= n
    if (s * s - 1) % n:
        raise NotApplicableError(f"s^2 != 1 mod {n}")
    if s == 1 % n or s == n - 1:
        raise NotApplicableError("s = +-1 mod n: abelian or dihedral, no factorisation")
    if n < 8:
        raise NotApplicableError(f"factorisation needs n >= 8, got {n}")
    n1 = n2 = h = 1
    for p, q in prime_powers(n):
        if p != 2:
            if (s + 1) % q == 0:
                n1 *= q
            elif (s - 1) % q == 0:
                n2 *= q
            else:  # pragma: no cover - excluded by s^2 = 1 for odd prime powers
                raise AssertionError(f"s is not +-1 mod {q}")
        elif q == 2:
            h = 2
        elif (s + 1) % q == 0:
            n1 *= q
        elif (s - 1) % q == 0:
            n2 *= q
        else:
            h, half = 2, q // 2
            if (s + 1) % half == 0:
                n1 *= half
            else:
                n2 *= half
    if n1 == 1 or n2 == 1:
        # n = 2^t, or s = n/2 +- 1 with 8 | n: only the split {1, n/2} exists
        assert h == 2 and n1 * n2 == n // 2, f"odd prime power or twice one: n = {n}"
        return Factorization(n1, n2, h, "b")
    assert h * n1 * n2 == n and math.gcd(n1, n2) == 1
    return Factorization(n1, n2, h, "a")


def n1_of(G: GroupSpec) -> Optional[int]:
    """n1 from the factorisation, or None for abelian/dihedral/small groups."""
    if G.s_class != PROPER or G.n < 8:
        return None
    return factorize(G.n, G.s).n1


# -- normal subgroups and quotients -----------------------------------------------


@dataclass(frozen=True)
class QuotientDesc:
    """A normal subgroup H of G together with G/H realised as a GroupSpec.

    ``h_model`` is a GroupSpec isomorphic to H; ``h_embed``/``h_lift`` move
    between H (inside G) and the model.
    """

    group: GroupSpec
    case: str
    generators: Tuple[Element, ...]
    elements: FrozenSet[Element]
    quotient: GroupSpec
    quotient_kind: str
    h_model: GroupSpec
    h_kind: str
    _proj: Callable[[Element], Element]
    _embed: Callable[[Element], Element]
    _lift: Callable[[Element], Element]

    def project(self, g: Element) -> Element:
        return self._proj(g)

    def h_embed(self, h: Element) -> Element:
        if h not in self.elements:
            raise ValueError(f"{format_element(h)} is not in H")
        return self._embed(h)

    def h_lift(self, h: Element) -> Element:
        return self._lift(h)

    @property
    def index(self) -> int:
        return self.group.order // len(self.elements)

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "H_generators": [format_element(g) for g in self.generators],
            "H_order": len(self.elements),
            "H_kind": self.h_kind,
            "quotient_kind": self.quotient_kind,
            "quotient_order": self.quotient.order,
        }


def _subgroup(G: GroupSpec, gens) -> FrozenSet[Element]:
    seen = {IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = G.mul(a, g)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(seen)


def _dihedral_kind(m: int) -> str:
    return "Klein" if m == 2 else f"D_{2 * m}"


def normal_subgroup(G: GroupSpec, fact: Factorization, case: str) -> QuotientDesc:
    """H and G/H for cases (a), (b), (c); normality and the homomorphism
    property are checked exhaustively."""
    n, n1, n2, h = G.n, fact.n1, fact.n2, fact.h
    if case == "a":
        if n2 % 2 == 0:
            raise NotApplicableError("case (a) needs n2 odd")
        d, m = n1, n // n1
        quotient = make_dihedral(n1)
        q_kind = _dihedral_kind(n1)
        proj = lambda g: Element(g.eps, g.k % n1)
    elif case == "b":
        if n2 % 2:
            raise NotApplicableError("case (b) needs n2 even")
        d, m = 2 * n1, n // (2 * n1)
        quotient = make_dihedral(2 * n1)
        q_kind = _dihedral_kind(2 * n1)
        proj = lambda g: Element(g.eps, g.k % (2 * n1))
    elif case == "c":
        if h != 1:
            raise NotApplicableError("case (c) needs n = n1 * n2")
        quotient = make_cyclic(n2)
        q_kind = f"C_{n2}"
        proj = lambda g: Element(0, g.k % n2)
        gens = (Element(1, 0), Element(0, n2 % n))
        elements = _subgroup(G, gens)
        model = make_dihedral(n1)
        embed = lambda g: Element(g.eps, (g.k // n2) % n1)
        lift = lambda e: Element(e.eps, (e.k * n2) % n)
        desc = QuotientDesc(G, case, gens, elements, quotient, q_kind, model, _dihedral_kind(n1), proj, embed, lift)
        _check_quotient(desc)
        return desc
    else:
        raise NotApplicableError(f"unknown case {case!r}")
    gens = (Element(0, d % n),)
    elements = _subgroup(G, gens)
    model = make_cyclic(m)
    embed = lambda g: Element(0, (g.k // d) % m)
    lift = lambda e: Element(0, (e.k * d) % n)
    desc = QuotientDesc(G, case, gens, elements, quotient, q_kind, model, f"C_{m}", proj, embed, lift)
    _check_quotient(desc)
    return desc


def _check_quotient(q: QuotientDesc) -> None:
    G, H, Q = q.group, q.elements, q.quotient
    for g in G.elements():
        for x in H:
            if G.conjugate(g, x) not in H:
                raise AssertionError(f"H is not normal: {g} conjugates {x} out of H")
    for a, b in G.iter_pairs():
        if q.project(G.mul(a, b)) != Q.mul(q.project(a), q.project(b)):
            raise AssertionError("projection is not a homomorphism")
    kernel = {g for g in G.elements() if q.project(g) == IDENTITY}
    if kernel != set(H) or len(H) * Q.order != G.order:
        raise AssertionError("kernel of projection differs from H")
    model = q.h_model
    for a in H:
        for b in H:
            if q.h_embed(G.mul(a, b)) != model.mul(q.h_embed(a), q.h_embed(b)):
                raise AssertionError("H model map is not a homomorphism")
        if q.h_lift(q.h_embed(a)) != a:
            raise AssertionError("H model map is not invertible")


def applicable_cases(G: GroupSpec, fact: Optional[Factorization] = None) -> List[str]:
    fact = fact or factorize(G.n, G.s)
    cases = ["a"] if fact.n2 % 2 else ["b"]
    if fact.h == 1:
        cases.append("c")
    return cases


def quotients(G: GroupSpec) -> List[QuotientDesc]:
    fact = factorize(G.n, G.s)
    return [normal_subgroup(G, fact, c) for c in applicable_cases(G, fact)]


def project(q: QuotientDesc, S: Sequence) -> Sequence:
    return S.map(q.quotient, q.project)


# -- generating pairs and automorphisms ----------------------------------------------

Pair = Tuple[Element, Element]


@lru_cache(maxsize=64)
def generating_pairs(G: GroupSpec) -> Tuple[Pair, ...]:
    """All (alpha, beta) with alpha^2 = beta^n = 1, ord(beta) = n,
    beta alpha = alpha beta^s and <alpha, beta> = G, in sorted order."""
    els = G.elements()
    alphas = [a for a in els if G.mul(a, a) == IDENTITY]
    betas = [b for b in els if G.element_order(b) == G.n]
    out = []
    for a in alphas:
        for b in betas:
            if G.mul(b, a) != G.mul(a, G.power(b, G.s)):
                continue
            if len(_subgroup(G, (a, b))) == G.order:
                out.append((a, b))
    return tuple(out)


def pair_map(G: GroupSpec, pair: Pair) -> Dict[Element, Element]:
    """x^e y^k -> alpha^e beta^k."""
    alpha, beta = pair
    powers = [IDENTITY]
    for _ in range(G.n - 1):
        powers.append(G.mul(powers[-1], beta))
    out = {}
    for g in G.elements():
        base = alpha if g.eps else IDENTITY
        out[g] = G.mul(base, powers[g.k])
    return out


@lru_cache(maxsize=64)
def automorphisms(G: GroupSpec) -> Tuple[Tuple[int, ...], ...]:
    """Automorphisms as permutations of flat element indices, one per
    generating pair (identity first)."""
    out = []
    seen = set()
    for pair in generating_pairs(G):
        m = pair_map(G, pair)
        perm = tuple(G.index(m[G.element(i)]) for i in range(G.order))
        if len(set(perm)) != G.order:  # pragma: no cover - pairs generate G
            continue
        if perm not in seen:
            seen.add(perm)
            out.append(perm)
    ident = tuple(range(G.order))
    out.sort(key=lambda p: p != ident)
    return tuple(out)


# -- extremal families ------------------------------------------------------------

DAVENPORT_ETA = "davenport_eta"
EGZ_EVEN = "egz_even"
GAO_EVEN = "gao_even"
EGZ_ODD = "egz_odd"
FAMILY_KINDS = (DAVENPORT_ETA, EGZ_EVEN, GAO_EVEN, EGZ_ODD)


@dataclass(frozen=True)
class FamilyParams:
    kind: str
    alpha: Element
    beta: Element
    t: Tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "matched": True,
            "kind": self.kind,
            "alpha": format_element(self.alpha),
            "beta": format_element(self.beta),
            "t": list(self.t),
        }


def family_length(G: GroupSpec, kind: str) -> int:
    n = G.n
    return {DAVENPORT_ETA: n, EGZ_EVEN: 2 * n - 1, GAO_EVEN: 3 * n - 1, EGZ_ODD: 3 * n - 1}[kind]


def free_length(G: GroupSpec, kind: str) -> Optional[int]:
    """Subsequence length the family avoids (None: all lengths)."""
    return {DAVENPORT_ETA: None, EGZ_EVEN: G.n, GAO_EVEN: 2 * G.n, EGZ_ODD: 2 * G.n}[kind]


def _check_kind(G: GroupSpec, kind: str) -> None:
    if kind not in FAMILY_KINDS:
        raise NotApplicableError(f"unknown family kind {kind!r}")
    if kind in (EGZ_EVEN, GAO_EVEN) and G.n % 2:
        raise NotApplicableError(f"{kind} needs n even")
    if kind == EGZ_ODD and G.n % 2 == 0:
        raise NotApplicableError(f"{kind} needs n odd")


def _family_counts(G: GroupSpec, kind: str, t: Tuple[int, ...]) -> Dict[Tuple[int, int], int]:
    """Family shape in (x, y)-coordinates: {(eps, k): multiplicity}."""
    n = G.n
    counts: Dict[Tuple[int, int], int] = {}

    def put(key, m):
        counts[key] = counts.get(key, 0) + m

    if kind == DAVENPORT_ETA:
        (t0,) = t
        put((0, 1), n - 1)
        put((1, t0 % n), 1)
    else:
        t1, t2, t3 = t
        big = n - 1 if kind == EGZ_EVEN else 2 * n - 1
        put((0, t1 % n), big)
        put((0, t2 % n), n - 1)
        put((1, t3 % n), 1)
    return counts


def family_member(
    G: GroupSpec, kind: str, pair: Pair, t: Tuple[int, ...], check: bool = True
) -> Sequence:
    """The explicit extremal sequence of ``kind`` for generating pair and exponents."""
    _check_kind(G, kind)
    if check:
        if pair not in generating_pairs(G):
            raise NotApplicableError(f"{pair} is not a generating pair")
        if kind != DAVENPORT_ETA and math.gcd(t[0] - t[1], G.n) != 1:
            raise NotApplicableError(f"gcd(t1 - t2, n) != 1 for t = {t}")
    m = pair_map(G, pair)
    counts: Dict[Element, int] = {}
    for (e, k), mult in _family_counts(G, kind, tuple(t)).items():
        g = m[Element(e, k)]
        counts[g] = counts.get(g, 0) + mult
    return Sequence.from_counts(G, counts)


def _match_coordinates(G: GroupSpec, kind: str, coords: Dict[Element, int]) -> Optional[Tuple[int, ...]]:
    n = G.n
    rot = {g.k: m for g, m in coords.items() if g.eps == 0}
    ref = [g.k for g, m in coords.items() if g.eps == 1 for _ in range(m)]
    if len(ref) != 1:
        return None
    t3 = ref[0]
    if kind == DAVENPORT_ETA:
        return (t3,) if rot == {1 % n: n - 1} else None
    if kind == EGZ_EVEN:
        if sorted(rot.values()) != [n - 1, n - 1]:
            return None
        t1, t2 = sorted(rot)
    else:
        big = [k for k, m in rot.items() if m == 2 * n - 1]
        small = [k for k, m in rot.items() if m == n - 1]
        if len(rot) != 2 or len(big) != 1 or len(small) != 1:
            return None
        t1, t2 = big[0], small[0]
    if math.gcd(t1 - t2, n) != 1:
        return None
    return (t1, t2, t3)


def classify_inverse(G: GroupSpec, S: Sequence, kind: str) -> Optional[FamilyParams]:
    """First generating pair (canonical order) whose family reproduces S."""
    _check_kind(G, kind)
    need = family_length(G, kind)
    if len(S) != need:
        raise NotApplicableError(f"{kind} classification needs length {need}, got {len(S)}")
    counts = S.counts()
    for pair in generating_pairs(G):
        inv = {v: k for k, v in pair_map(G, pair).items()}
        coords: Dict[Element, int] = {}
        for g, m in counts.items():
            c = inv[g]
            coords[c] = coords.get(c, 0) + m
        t = _match_coordinates(G, kind, coords)
        if t is not None:
            params = FamilyParams(kind, pair[0], pair[1], t)
            assert family_member(G, kind, pair, t) == S
            return params
    return None


def is_family_free_analytic(G: GroupSpec, kind: str, pair: Pair, t: Tuple[int, ...]) -> bool:
    """Decide the family's avoidance property by counting, without product DP.

    Any subsequence using the single term outside <beta> has product in
    alpha<beta>, which excludes 1.  Inside <beta> everything commutes, so a
    product-one subsequence with a copies of beta^{t1} and b of beta^{t2}
    exists iff a*t1 + b*t2 = 0 mod n for admissible (a, b).
    """
    _check_kind(G, kind)
    if pair not in generating_pairs(G):
        raise NotApplicableError(f"{pair} is not a generating pair")
    n = G.n
    counts = _family_counts(G, kind, tuple(t))
    rot = [(k, m) for (e, k), m in counts.items() if e == 0]
    need = free_length(G, kind)
    if kind == DAVENPORT_ETA:
        ((k, v),) = rot
        return all((a * k) % n for a in range(1, v + 1))
    if len(rot) == 1:  # t1 = t2 mod n
        ((k, v),) = rot
        return need > v or (need * k) % n != 0
    (k1, v1), (k2, v2) = rot
    for a in range(max(0, need - v2), min(v1, need) + 1):
        if (a * k1 + (need - a) * k2) % n == 0:
            return False
    return True
