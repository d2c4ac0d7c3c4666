"""Zero-sum invariants and product-one witnesses over G_{n,s} = C_n x|_s C_2."""

from __future__ import annotations

from .group import Element, GroupSpec, IDENTITY, NotAGroupError, make_cyclic, make_dihedral, make_group
from .sequence import OrderedWitness, Sequence, format_sequence, parse_sequence

__all__ = [
    "Element",
    "GroupSpec",
    "IDENTITY",
    "NotAGroupError",
    "OrderedWitness",
    "Sequence",
    "format_sequence",
    "make_cyclic",
    "make_dihedral",
    "make_group",
    "parse_sequence",
]
