"""Subsampling operators and permutation utilities.

Two subsamplers are provided: independent per-element thinning, and the
correlated prefix subsampler (everything before a uniformly placed sentinel
in a random permutation). The conditional insertion law of the latter,
Pr[next element lands in T | current intersection has size s] = (s+1)/(i+1),
is what the prefix-based scheme's guarantee rests on; the exact-enumeration
tests reproduce it with zero error.
"""

from __future__ import annotations

from random import Random
from typing import Iterable, Sequence

from .bitset import SubsetMask, iter_bits, mask_of


class Permutation:
    """A bijection on {0, ..., n-1}; order[p] is the element at position p."""

    __slots__ = ("order", "_pos")

    def __init__(self, order: Sequence[int]):
        order = tuple(order)
        n = len(order)
        pos = [-1] * n
        for p, e in enumerate(order):
            if not 0 <= e < n or pos[e] != -1:
                raise ValueError(f"not a permutation of 0..{n - 1}: {order}")
            pos[e] = p
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "_pos", tuple(pos))

    def __setattr__(self, *args):
        raise AttributeError("Permutation is immutable")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @property
    def n(self) -> int:
        return len(self.order)

    def position(self, e: int) -> int:
        if not 0 <= e < self.n:
            raise ValueError(f"element {e} outside ground set of size {self.n}")
        return self._pos[e]

    def prefix_bits(self, e: int) -> int:
        """Elements strictly before e, as a bitmask."""
        p = self.position(e)
        return mask_of(self.order[:p])

    def prefix_of(self, e: int) -> SubsetMask:
        return SubsetMask(self.n, self.prefix_bits(e))

    def first_bits(self, k: int) -> int:
        """The first k elements, as a bitmask."""
        return mask_of(self.order[:k])

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.order == other.order

    def __hash__(self) -> int:
        return hash(self.order)

    def __repr__(self) -> str:
        return f"Permutation({list(self.order)})"


def random_permutation(n: int, rng: Random) -> Permutation:
    items = list(range(n))
    rng.shuffle(items)
    return Permutation(items)


def shuffled(elements: Iterable[int], rng: Random) -> list[int]:
    items = list(elements)
    rng.shuffle(items)
    return items


def t_rho_bits(bits: int, rho: float, rng: Random) -> int:
    if not 0 <= rho <= 1:
        raise ValueError(f"keep probability {rho} outside [0,1]")
    if rho == 1:
        return bits
    kept = 0
    if rho > 0:
        for e in iter_bits(bits):
            if rng.random() < rho:
                kept |= 1 << e
    return kept


def t_rho(S: SubsetMask, rho: float, rng: Random) -> SubsetMask:
    """Keep each element of S independently with probability rho."""
    return SubsetMask(S.n, t_rho_bits(S.bits, float(rho), rng))


def prefix_subsample_bits(n: int, rng: Random) -> int:
    """Correlated subsample of {0..n-1}: shuffle n+1 symbols (the extra
    symbol n acts as sentinel) and keep the originals before the sentinel.
    |T| is uniform on {0..n}."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    symbols = list(range(n + 1))
    rng.shuffle(symbols)
    bits = 0
    for s in symbols:
        if s == n:
            break
        bits |= 1 << s
    return bits


def prefix_subsample(n: int, rng: Random) -> SubsetMask:
    return SubsetMask(n, prefix_subsample_bits(n, rng))
