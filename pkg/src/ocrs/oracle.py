"""Exact ground truth for small instances.

Everything here enumerates: the best achievable balancedness of any
offline selection rule (as an LP over per-atom selection distributions),
the exact per-element balancedness of a scheme by integrating out its
randomness, and exhaustive weighted-rank maximization. Probabilities are
Fractions end to end, so equality assertions in tests are legitimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Optional

from .bitset import iter_bits, popcount
from .matroid import Matroid
from .priors import Prior, to_fraction
from .schemes import (
    DETERMINISTIC_SECRETARIES,
    IndependentSubsampling,
    OrderedGreedy,
    PermutationMixture,
    PrefixSubsampling,
    Scheme,
    WeightMixture,
    greedy_ordered_bits,
    secretary_wrap_bits,
)
from .simplex import solve_lp

INDEPENDENT_ENUM_LIMIT = 14  # 2^n thinning outcomes
PREFIX_ENUM_LIMIT = 8  # (n+1)! sentinel permutations, enumerated by subset weight
BRUTEFORCE_LIMIT = 20


class EnumerationTooLarge(ValueError):
    pass


def independent_subsets(M: Matroid, pool_bits: int) -> list[int]:
    """All independent subsets of pool_bits (the family is downward closed,
    so depth-first growth visits each exactly once)."""
    elems = list(iter_bits(pool_bits))
    out = [0]

    def grow(bits: int, start: int):
        for idx in range(start, len(elems)):
            cand = bits | (1 << elems[idx])
            if M._independent(cand):
                out.append(cand)
                grow(cand, idx + 1)

    grow(0, 0)
    return out


@dataclass
class AlphaCertificate:
    """Best achievable balancedness alpha_star, with an achieving rule:
    for each support atom, a distribution over independent subsets."""

    alpha_star: Fraction
    witness: dict  # atom bits -> list of (subset bits, probability)
    per_element: list  # conditional selection probability under the witness

    def min_balancedness(self) -> Fraction:
        vals = [v for v in self.per_element if v is not None]
        return min(vals) if vals else Fraction(1)

    def to_json(self) -> dict:
        return {
            "alpha_star": str(self.alpha_star),
            "witness": {
                str(sorted(iter_bits(atom))): [
                    {"subset": sorted(iter_bits(y)), "prob": str(p)} for y, p in dist
                ]
                for atom, dist in self.witness.items()
            },
            "per_element": [None if v is None else str(v) for v in self.per_element],
        }


def max_uncontentious_alpha(M: Matroid, P: Prior) -> AlphaCertificate:
    """Exact LP over all (atom, independent subset) selection variables:
    maximize the worst-case conditional selection probability.

    The optimum is the largest alpha for which some alpha-balanced offline
    selection rule exists, i.e. the instance's uncontentiousness level.
    """
    support = P.support()
    if support is None:
        raise EnumerationTooLarge("oracle needs an explicit prior support")
    atoms = [(bits, p) for bits, p in support if p > 0]
    probs = [Fraction(0)] * M.n
    for bits, p in atoms:
        for e in iter_bits(bits):
            probs[e] += p

    variables: list[tuple[int, int]] = []  # (atom index, subset bits)
    offsets = []
    for ai, (bits, _) in enumerate(atoms):
        subs = independent_subsets(M, bits)
        offsets.append((len(variables), len(subs)))
        variables.extend((ai, y) for y in subs)

    nv = 1 + len(variables)  # alpha first
    c = [Fraction(1)] + [Fraction(0)] * len(variables)
    A_eq, b_eq = [], []
    for ai in range(len(atoms)):
        row = [Fraction(0)] * nv
        start, count = offsets[ai]
        for v in range(start, start + count):
            row[1 + v] = Fraction(1)
        A_eq.append(row)
        b_eq.append(Fraction(1))
    A_ub, b_ub = [], []
    for i in range(M.n):
        if probs[i] == 0:
            continue
        row = [Fraction(0)] * nv
        row[0] = probs[i]
        for v, (ai, y) in enumerate(variables):
            if (y >> i) & 1:
                row[1 + v] = -atoms[ai][1]
        A_ub.append(row)
        b_ub.append(Fraction(0))
    cap = [Fraction(0)] * nv
    cap[0] = Fraction(1)
    A_ub.append(cap)
    b_ub.append(Fraction(1))

    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, maximize=True)

    witness: dict[int, list] = {}
    for v, (ai, y) in enumerate(variables):
        weight = res.x[1 + v]
        if weight > 0:
            witness.setdefault(atoms[ai][0], []).append((y, weight))
    per_element: list[Optional[Fraction]] = []
    for i in range(M.n):
        if probs[i] == 0:
            per_element.append(None)
            continue
        mass = Fraction(0)
        for v, (ai, y) in enumerate(variables):
            if (y >> i) & 1 and res.x[1 + v] > 0:
                mass += atoms[ai][1] * res.x[1 + v]
        per_element.append(mass / probs[i])
    return AlphaCertificate(alpha_star=res.objective, witness=witness, per_element=per_element)


def _scheme_randomness(M: Matroid, scheme: Scheme):
    """Yield (weight, deterministic selector) pairs covering the scheme's
    internal randomness exactly."""
    n = scheme.n
    if isinstance(scheme, OrderedGreedy):
        order = scheme.order.order
        yield Fraction(1), lambda a: greedy_ordered_bits(M, order, a)
    elif isinstance(scheme, PermutationMixture):
        for pi, wt in scheme.components:
            order = pi.order
            yield wt, lambda a, order=order: greedy_ordered_bits(M, order, a)
    elif isinstance(scheme, IndependentSubsampling):
        if n > INDEPENDENT_ENUM_LIMIT:
            raise EnumerationTooLarge(f"2^{n} thinning outcomes exceed limit")
        rho = to_fraction(scheme.rho)
        order = scheme.order.order
        for t in range(1 << n):
            w = rho ** popcount(t) * (1 - rho) ** (n - popcount(t))
            if w > 0:
                yield w, lambda a, t=t: greedy_ordered_bits(M, order, a & t)
    elif isinstance(scheme, PrefixSubsampling):
        if n > PREFIX_ENUM_LIMIT:
            raise EnumerationTooLarge(f"({n}+1)! sentinel permutations exceed limit")
        order = scheme.order.order
        fact = [math.factorial(i) for i in range(n + 2)]
        for t in range(1 << n):
            s = popcount(t)
            w = Fraction(fact[s] * fact[n - s], fact[n + 1])
            yield w, lambda a, t=t: greedy_ordered_bits(M, order, a & t)
    elif isinstance(scheme, WeightMixture):
        if scheme.secretary_kind not in DETERMINISTIC_SECRETARIES:
            raise EnumerationTooLarge(
                f"secretary {scheme.secretary_kind!r} is randomized; no exact enumeration"
            )
        dummy = Random(0)
        for wv, wt in scheme.components:
            yield wt, lambda a, wv=wv: secretary_wrap_bits(
                scheme.secretary_kind, wv, M, a, dummy
            )
    else:
        raise TypeError(f"cannot enumerate scheme {type(scheme).__name__}")


def exact_balancedness(M: Matroid, scheme: Scheme, P: Prior) -> list:
    """Per-element conditional selection probability, by joint enumeration
    of the support and the scheme randomness. None for never-active elements."""
    support = P.support()
    if support is None:
        raise EnumerationTooLarge("exact balancedness needs an explicit prior support")
    n = M.n
    probs = [Fraction(0)] * n
    selmass = [Fraction(0)] * n
    for w, selector in _scheme_randomness(M, scheme):
        for atom, p in support:
            if p == 0:
                continue
            wp = w * p
            for e in iter_bits(selector(atom)):
                selmass[e] += wp
    for atom, p in support:
        for e in iter_bits(atom):
            probs[e] += p
    return [selmass[i] / probs[i] if probs[i] > 0 else None for i in range(n)]


def bruteforce_weighted_rank(M: Matroid, w, S) -> object:
    """Exhaustive max-weight independent subset of S; the ground truth the
    greedy weighted rank is checked against."""
    bits = S.bits if hasattr(S, "bits") else S
    if popcount(bits) > BRUTEFORCE_LIMIT:
        raise EnumerationTooLarge(f"|S|={popcount(bits)} exceeds {BRUTEFORCE_LIMIT}")
    elems = list(iter_bits(bits))
    best = 0

    def grow(cur_bits, cur_w, start):
        nonlocal best
        if cur_w > best:
            best = cur_w
        for idx in range(start, len(elems)):
            cand = cur_bits | (1 << elems[idx])
            if M._independent(cand):
                grow(cand, cur_w + w[elems[idx]], idx + 1)

    grow(0, 0, 0)
    return best
