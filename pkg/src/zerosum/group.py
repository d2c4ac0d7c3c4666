"""Arithmetic in G_{n,s} = <x, y | x^2 = y^n = 1, yx = x y^s>.

Elements are pairs ``(eps, k)`` standing for ``x^eps y^k``.  Internally a flat
index ``eps * n + k`` is used for dense bitmask tables.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Iterator, List, NamedTuple, Tuple


class NotAGroupError(ValueError):
    """Raised when (n, s) does not satisfy s^2 = 1 (mod n)."""


class Element(NamedTuple):
    eps: int
    k: int

    def __str__(self) -> str:
        return format_element(self)


IDENTITY = Element(0, 0)

ABELIAN = "abelian"
DIHEDRAL = "dihedral"
PROPER = "proper"


@dataclass(frozen=True)
class GroupSpec:
    """Validated parameters of G_{n,s}.

    ``rotations_only`` restricts the group to the cyclic subgroup <y> (used to
    model C_n); all arithmetic is unchanged.
    """

    n: int
    s: int
    rotations_only: bool = False
    s_class: str = field(init=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if (self.s * self.s - 1) % self.n:
            raise NotAGroupError(f"not a group: s^2 = {self.s * self.s} is not 1 mod {self.n}")
        if self.s % self.n != self.s:
            object.__setattr__(self, "s", self.s % self.n)
        if self.rotations_only or (self.s - 1) % self.n == 0:
            cls = ABELIAN
        elif (self.s + 1) % self.n == 0:
            cls = DIHEDRAL
        else:
            cls = PROPER
        object.__setattr__(self, "s_class", cls)

    # -- basic structure -------------------------------------------------

    @property
    def order(self) -> int:
        return self.n if self.rotations_only else 2 * self.n

    def powers_of_s(self) -> Tuple[int, int]:
        return (1 % self.n, self.s)

    def elements(self) -> List[Element]:
        cosets = (0,) if self.rotations_only else (0, 1)
        return [Element(e, k) for e in cosets for k in range(self.n)]

    def index(self, a: Element) -> int:
        return a.eps * self.n + a.k

    def element(self, idx: int) -> Element:
        return Element(*divmod(idx, self.n))

    def elem(self, eps: int, k: int) -> Element:
        if eps not in (0, 1):
            raise ValueError(f"eps must be 0 or 1, got {eps}")
        if eps and self.rotations_only:
            raise ValueError("reflections are not in the cyclic subgroup <y>")
        return Element(eps, k % self.n)

    def contains(self, a: Element) -> bool:
        return a.eps in ((0,) if self.rotations_only else (0, 1)) and 0 <= a.k < self.n

    # -- arithmetic ------------------------------------------------------

    def mul(self, a: Element, b: Element) -> Element:
        k = a.k * self.s + b.k if b.eps else a.k + b.k
        return Element(a.eps ^ b.eps, k % self.n)

    def product(self, items: Iterable[Element]) -> Element:
        return reduce(self.mul, items, IDENTITY)

    def inverse(self, a: Element) -> Element:
        if a.eps:
            # (x y^k)^{-1} = y^{-k} x = x y^{-ks}
            return Element(1, (-a.k * self.s) % self.n)
        return Element(0, (-a.k) % self.n)

    def power(self, a: Element, t: int) -> Element:
        out = IDENTITY
        for _ in range(t % self.element_order(a)):
            out = self.mul(out, a)
        return out

    def element_order(self, a: Element) -> int:
        t, cur = 1, a
        while cur != IDENTITY:
            cur = self.mul(cur, a)
            t += 1
        return t

    def exponent(self) -> int:
        return reduce(math.lcm, (self.element_order(a) for a in self.elements()), 1)

    def conjugate(self, g: Element, h: Element) -> Element:
        """Return g h g^{-1}."""
        return self.mul(self.mul(g, h), self.inverse(g))

    def iter_pairs(self) -> Iterator[Tuple[Element, Element]]:
        els = self.elements()
        for a in els:
            for b in els:
                yield a, b

    def label(self) -> str:
        if self.rotations_only:
            return f"C_{self.n}"
        if self.s_class == DIHEDRAL:
            return f"D_{2 * self.n}"
        return f"G_{{{self.n},{self.s}}}"


def make_group(n: int, s: int) -> GroupSpec:
    """Validate (n, s) and return the group G_{n,s}."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return GroupSpec(n, s % n)


def make_cyclic(n: int) -> GroupSpec:
    """C_n realised as the subgroup <y> of G_{n,1}."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return GroupSpec(n, 1 % n, rotations_only=True)


def make_dihedral(m: int) -> GroupSpec:
    """D_{2m} = G_{m,-1}; for m <= 2 this is abelian (C_2 or the Klein group)."""
    return GroupSpec(m, (-1) % m)


# -- text form ---------------------------------------------------------------

_ATOM = re.compile(r"1|x\*y\^(-?\d+)|x|y\^(-?\d+)")


def format_element(a: Element) -> str:
    if a.eps == 0:
        return "1" if a.k == 0 else f"y^{a.k}"
    return "x" if a.k == 0 else f"x*y^{a.k}"


def parse_element(text: str, G: GroupSpec) -> Element:
    m = _ATOM.fullmatch(text.strip())
    if not m:
        raise ValueError(f"cannot parse element {text!r}")
    tok = m.group(0)
    if tok == "1":
        return G.elem(0, 0)
    if tok == "x":
        return G.elem(1, 0)
    if m.group(1) is not None:
        return G.elem(1, int(m.group(1)))
    return G.elem(0, int(m.group(2)))
