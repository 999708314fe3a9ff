"""Finite universes, bit-vector sets and the integer codings used throughout.

A subset of ``{0, ..., N-1}`` is stored as a Python int bitmask: bit ``i`` set
means ``i`` is a member.  The same object doubles as a binary string of length
``N`` whose leftmost character is position 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

WORD_LIMIT = 1 << 64


class CodingError(ValueError):
    """Raised when a pairing value leaves the machine-word range."""


def default_tau(size: int) -> int:
    """Largeness threshold ``ceil(3N/4)``, kept inside the universe."""
    return min((3 * size + 3) // 4, max(size - 1, 0))


def range_mask(lo: int, hi: int) -> int:
    """Bitmask of positions ``lo <= i < hi`` (empty if ``hi <= lo``)."""
    if hi <= lo:
        return 0
    return ((1 << (hi - lo)) - 1) << lo


def low_mask(k: int) -> int:
    return (1 << k) - 1 if k > 0 else 0


def infinite_like(mask: int, tau: int) -> bool:
    """A set counts as "infinite" when it has a member at or above ``tau``."""
    return (mask >> tau) != 0


@dataclass(frozen=True)
class Universe:
    size: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError(f"universe size must be >= 1, got {self.size}")

    def check(self, x: int) -> int:
        if not 0 <= x < self.size:
            raise IndexError(f"element {x} outside universe of size {self.size}")
        return x

    def empty(self) -> "BitVector":
        return BitVector(self.size, 0)

    def full(self) -> "BitVector":
        return BitVector(self.size, low_mask(self.size))

    def all_sets(self) -> Iterator["BitVector"]:
        for mask in range(1 << self.size):
            yield BitVector(self.size, mask)


@dataclass(frozen=True, order=True)
class BitVector:
    """Characteristic string of a subset of a finite universe."""

    size: int
    mask: int = 0

    def __post_init__(self) -> None:
        if self.size < 0:
            raise ValueError("negative length")
        if self.mask < 0 or self.mask >> self.size:
            raise ValueError(f"mask {self.mask:#x} does not fit in {self.size} bits")

    # constructors -----------------------------------------------------------

    @classmethod
    def from_string(cls, bits: str) -> "BitVector":
        if any(c not in "01" for c in bits):
            raise ValueError(f"not a 0/1 string: {bits!r}")
        mask = 0
        for i, c in enumerate(bits):
            if c == "1":
                mask |= 1 << i
        return cls(len(bits), mask)

    @classmethod
    def from_elements(cls, size: int, elements: Iterable[int]) -> "BitVector":
        mask = 0
        for x in elements:
            if not 0 <= x < size:
                raise IndexError(f"element {x} outside universe of size {size}")
            mask |= 1 << x
        return cls(size, mask)

    @classmethod
    def evens(cls, size: int) -> "BitVector":
        return cls.from_elements(size, range(0, size, 2))

    # views ------------------------------------------------------------------

    @property
    def universe(self) -> Universe:
        return Universe(self.size)

    def __str__(self) -> str:
        return "".join("1" if (self.mask >> i) & 1 else "0" for i in range(self.size))

    def __iter__(self) -> Iterator[int]:
        m, i = self.mask, 0
        while m:
            if m & 1:
                yield i
            m >>= 1
            i += 1

    def __contains__(self, x: object) -> bool:
        return isinstance(x, int) and 0 <= x < self.size and bool((self.mask >> x) & 1)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.size:
            raise IndexError(i)
        return (self.mask >> i) & 1

    def count(self) -> int:
        return bin(self.mask).count("1")

    def elements(self) -> list[int]:
        return list(self)

    # set algebra ------------------------------------------------------------

    def _same(self, other: "BitVector") -> None:
        if other.size != self.size:
            raise ValueError(f"size mismatch: {self.size} vs {other.size}")

    def complement(self) -> "BitVector":
        return BitVector(self.size, low_mask(self.size) & ~self.mask)

    def union(self, other: "BitVector") -> "BitVector":
        self._same(other)
        return BitVector(self.size, self.mask | other.mask)

    def intersection(self, other: "BitVector") -> "BitVector":
        self._same(other)
        return BitVector(self.size, self.mask & other.mask)

    def difference(self, other: "BitVector") -> "BitVector":
        self._same(other)
        return BitVector(self.size, self.mask & ~other.mask)

    def issubset(self, other: "BitVector") -> bool:
        self._same(other)
        return self.mask & ~other.mask == 0

    def infinite_like(self, tau: int) -> bool:
        return infinite_like(self.mask, tau)

    # string algebra ---------------------------------------------------------

    def prefix(self, k: int) -> "BitVector":
        """``A|k``: the first ``k`` characters."""
        if not 0 <= k <= self.size:
            raise IndexError(f"prefix length {k} outside 0..{self.size}")
        return BitVector(k, self.mask & low_mask(k))

    def window(self, lo: int, hi: int) -> "BitVector":
        """``A|[lo, hi)`` as a string of length ``hi - lo``."""
        if not 0 <= lo <= hi <= self.size:
            raise IndexError(f"window [{lo},{hi}) outside 0..{self.size}")
        return BitVector(hi - lo, (self.mask >> lo) & low_mask(hi - lo))

    def concat(self, other: "BitVector") -> "BitVector":
        return BitVector(self.size + other.size, self.mask | (other.mask << self.size))

    def resize(self, size: int) -> "BitVector":
        """Reinterpret as a string of a different length (truncates or pads with 0)."""
        return BitVector(size, self.mask & low_mask(size))

    def is_prefix_of(self, other: "BitVector") -> bool:
        return self.size <= other.size and other.mask & low_mask(self.size) == self.mask


# codings -------------------------------------------------------------------


def pair(x: int, y: int) -> int:
    """Cantor pairing ``(x+y)(x+y+1)/2 + y``."""
    if x < 0 or y < 0:
        raise CodingError(f"pair() needs naturals, got ({x}, {y})")
    z = (x + y) * (x + y + 1) // 2 + y
    if z >= WORD_LIMIT:
        raise CodingError(f"pair({x}, {y}) = {z} exceeds 64-bit range")
    return z


def unpair(z: int) -> tuple[int, int]:
    if not 0 <= z < WORD_LIMIT:
        raise CodingError(f"unpair() argument {z} outside 64-bit range")
    from math import isqrt

    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def decode_finite_set(y: int, size: int) -> BitVector:
    """Canonical finite set ``D_y``: the 1-bits of ``y``."""
    if y < 0:
        raise ValueError(f"canonical index must be natural, got {y}")
    if y >> size:
        raise IndexError(f"D_{y} has an element >= universe size {size}")
    return BitVector(size, y)


def encode_finite_set(d: BitVector) -> int:
    return d.mask


def flip(a: BitVector, n: int) -> BitVector:
    if not 0 <= n < a.size:
        raise IndexError(f"position {n} outside universe of size {a.size}")
    return BitVector(a.size, a.mask ^ (1 << n))


def mask(a: BitVector, n: int) -> BitVector:
    """``A - {n}``."""
    if not 0 <= n < a.size:
        raise IndexError(f"position {n} outside universe of size {a.size}")
    return BitVector(a.size, a.mask & ~(1 << n))


# enumerations --------------------------------------------------------------


@dataclass(frozen=True)
class SetEnumeration:
    """A finite, repetition-free stream of elements of a universe."""

    size: int
    items: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for x in self.items:
            if not 0 <= x < self.size:
                raise IndexError(f"element {x} outside universe of size {self.size}")
            if x in seen:
                raise ValueError(f"element {x} enumerated twice")
            seen.add(x)

    def __iter__(self) -> Iterator[int]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def as_set(self) -> BitVector:
        return BitVector.from_elements(self.size, self.items)

    @classmethod
    def ascending(cls, a: BitVector) -> "SetEnumeration":
        return cls(a.size, tuple(a))


# text format ---------------------------------------------------------------


def parse_set(text: str, size: int | None = None) -> BitVector:
    """Read ``0101...`` or ``set: 1,3,5``; the element-list form needs ``size``."""
    line = text.strip()
    if line.startswith("set:"):
        if size is None:
            raise ValueError("element-list form needs an explicit universe size")
        body = line[4:].strip()
        elements = [int(tok) for tok in body.replace(",", " ").split()] if body else []
        return BitVector.from_elements(size, elements)
    bv = BitVector.from_string(line)
    if size is not None and bv.size != size:
        raise ValueError(f"string of length {bv.size} given for universe of size {size}")
    return bv


def format_set(a: BitVector, style: str = "string") -> str:
    if style == "string":
        return str(a)
    if style == "list":
        return "set: " + ",".join(str(x) for x in a)
    raise ValueError(f"unknown set style {style!r}")
