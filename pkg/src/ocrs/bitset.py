"""Fixed-width subsets of a ground set {0, ..., n-1}, stored as bitmasks.

SubsetMask is the currency passed across the public API. Hot loops inside
the package work on the raw ``bits`` integers and wrap results at the
boundary; Python ints make the width-64 cutoff irrelevant.
"""

from __future__ import annotations

from typing import Iterable, Iterator


def iter_bits(bits: int) -> Iterator[int]:
    """Yield the set bit positions of ``bits`` in ascending order."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def full_mask(n: int) -> int:
    return (1 << n) - 1


def popcount(bits: int) -> int:
    return bin(bits).count("1")


class DimensionMismatch(ValueError):
    """Two objects over different ground-set sizes were combined."""


class SubsetMask:
    """An immutable subset of {0, ..., n-1}."""

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: int = 0):
        if n < 0:
            raise ValueError(f"ground-set size must be >= 0, got {n}")
        if bits < 0 or bits >> n:
            raise ValueError(f"bits {bits:#x} not contained in ground set of size {n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, *args):
        raise AttributeError("SubsetMask is immutable")

    @classmethod
    def from_elements(cls, n: int, elements: Iterable[int]) -> "SubsetMask":
        return cls(n, mask_of(elements))

    @classmethod
    def full(cls, n: int) -> "SubsetMask":
        return cls(n, full_mask(n))

    @classmethod
    def empty(cls, n: int) -> "SubsetMask":
        return cls(n, 0)

    def cardinality(self) -> int:
        return popcount(self.bits)

    def elements(self) -> list[int]:
        return list(iter_bits(self.bits))

    def __contains__(self, e: int) -> bool:
        return 0 <= e < self.n and (self.bits >> e) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __len__(self) -> int:
        return self.cardinality()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SubsetMask)
            and self.n == other.n
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.n, self.bits))

    def _check(self, other: "SubsetMask") -> None:
        if self.n != other.n:
            raise DimensionMismatch(f"ground sizes differ: {self.n} vs {other.n}")

    def __and__(self, other: "SubsetMask") -> "SubsetMask":
        self._check(other)
        return SubsetMask(self.n, self.bits & other.bits)

    def __or__(self, other: "SubsetMask") -> "SubsetMask":
        self._check(other)
        return SubsetMask(self.n, self.bits | other.bits)

    def __sub__(self, other: "SubsetMask") -> "SubsetMask":
        self._check(other)
        return SubsetMask(self.n, self.bits & ~other.bits)

    def __invert__(self) -> "SubsetMask":
        return SubsetMask(self.n, full_mask(self.n) & ~self.bits)

    def issubset(self, other: "SubsetMask") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def add(self, e: int) -> "SubsetMask":
        if not 0 <= e < self.n:
            raise ValueError(f"element {e} outside ground set of size {self.n}")
        return SubsetMask(self.n, self.bits | (1 << e))

    def remove(self, e: int) -> "SubsetMask":
        if e not in self:
            raise KeyError(e)
        return SubsetMask(self.n, self.bits & ~(1 << e))

    def __repr__(self) -> str:
        return f"SubsetMask({self.n}, {{{', '.join(map(str, self))}}})"
