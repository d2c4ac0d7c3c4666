"""Dense bitmask sets over small index ranges.

Sets of residues / group elements are Python ints; bit ``i`` set means ``i``
is a member.  Permutations of bit positions are applied through per-byte
lookup tables, which keeps them at O(width / 8) big-int operations.
"""

from __future__ import annotations

from typing import Iterable, Iterator, List, Sequence


def bits_of(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(items: Iterable[int]) -> int:
    out = 0
    for i in items:
        out |= 1 << i
    return out


def rotate(mask: int, a: int, n: int) -> int:
    """Image of a residue set under r -> r + a (mod n)."""
    a %= n
    if not a:
        return mask
    full = (1 << n) - 1
    return ((mask << a) | (mask >> (n - a))) & full


class MaskPerm:
    """Bit-position permutation ``i -> perm[i]`` applied to whole masks."""

    __slots__ = ("width", "_tables")

    def __init__(self, perm: Sequence[int]):
        self.width = len(perm)
        self._tables: List[List[int]] = []
        for base in range(0, self.width, 8):
            chunk = perm[base : base + 8]
            table = [0] * (1 << len(chunk))
            for byte in range(1, len(table)):
                low = byte & -byte
                table[byte] = table[byte ^ low] | (1 << chunk[low.bit_length() - 1])
            self._tables.append(table)

    def __call__(self, mask: int) -> int:
        out = 0
        for table in self._tables:
            if mask & 0xFF:
                out |= table[mask & 0xFF]
            mask >>= 8
            if not mask:
                break
        return out


def scale_perm(factor: int, n: int) -> MaskPerm:
    """Residue set permutation r -> factor * r (mod n); factor must be a unit."""
    return MaskPerm([(factor * r) % n for r in range(n)])
