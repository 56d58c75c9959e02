"""Prior distributions over active sets.

A prior knows how to sample an active set and, when the support is
structured (explicit list / product / all-active), how to report exact
activation probabilities and an exact p_min. Opaque samplers fall back to
a Hoeffding estimate of p_min.

Exact probabilities are kept as Fractions so downstream enumeration
(oracles, exact preselection) carries no rounding error. Float inputs are
read as their decimal literal (0.2 means 1/5).
"""

from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction
from random import Random
from typing import Callable, Iterable, Optional, Sequence

from .bitset import DimensionMismatch, SubsetMask, full_mask, iter_bits, mask_of

PROB_SUM_TOL = Fraction(1, 10**12)


class PriorError(ValueError):
    pass


def to_fraction(x) -> Fraction:
    """Exact Fraction from int/Fraction/str; floats via their repr digits."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


class Prior:
    """Base class; subclasses implement `sample_bits`."""

    n: int

    def __init__(self, n: int):
        self.n = n

    def sample_bits(self, rng: Random) -> int:
        raise NotImplementedError

    def sample(self, rng: Random) -> SubsetMask:
        return SubsetMask(self.n, self.sample_bits(rng))

    def support(self) -> Optional[list[tuple[int, Fraction]]]:
        """Explicit (bits, probability) atoms, or None when unknown."""
        return None

    def activation_probabilities(self) -> Optional[list[Fraction]]:
        sup = self.support()
        if sup is None:
            return None
        probs = [Fraction(0)] * self.n
        for bits, p in sup:
            for e in iter_bits(bits):
                probs[e] += p
        return probs

    @property
    def never_active_bits(self) -> int:
        """Elements with zero activation probability (arises in marginals)."""
        probs = self.activation_probabilities()
        if probs is None:
            return 0
        return mask_of(e for e, p in enumerate(probs) if p == 0)

    def p_min(self, rng: Optional[Random] = None, eps: float = 0.05):
        """Smallest positive activation probability.

        Exact for structured priors; opaque samplers need an rng and return
        a lower-confidence estimate (see SamplerPrior).
        """
        probs = self.activation_probabilities()
        if probs is None:
            raise PriorError("p_min unknown for opaque sampler; pass an rng")
        positive = [p for p in probs if p > 0]
        if not positive:
            raise PriorError("no element is ever active")
        return min(positive)

    def marginal(self, S: SubsetMask) -> "Prior":
        """Distribution of A ∩ S. Elements outside S become never-active."""
        if S.n != self.n:
            raise DimensionMismatch(f"marginal set over {S.n}, prior over {self.n}")
        return _MarginalSamplerPrior(self, S.bits)

    def to_spec(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} has no JSON form")


class ExplicitPrior(Prior):
    """Finite support given as (subset, probability) atoms.

    Atoms are stored sorted by mask value so inverse-CDF sampling is
    deterministic for a fixed seed. Probabilities must be nonnegative and
    sum to 1 (exactly, up to 1e-12 to admit float input).
    """

    def __init__(self, n: int, atoms: Iterable[tuple[object, object]]):
        super().__init__(n)
        merged: dict[int, Fraction] = {}
        for subset, prob in atoms:
            bits = subset if isinstance(subset, int) else mask_of(subset)
            if bits >> n:
                raise PriorError(f"support atom {bits:#x} outside ground set")
            p = to_fraction(prob)
            if p < 0:
                raise PriorError(f"negative probability {prob}")
            merged[bits] = merged.get(bits, Fraction(0)) + p
        total = sum(merged.values(), Fraction(0))
        if abs(total - 1) > PROB_SUM_TOL:
            raise PriorError(f"probabilities sum to {total}, expected 1")
        self.atoms: list[tuple[int, Fraction]] = sorted(merged.items())
        cum = 0.0
        self._cdf = []
        for _, p in self.atoms:
            cum += float(p)
            self._cdf.append(cum)
        self._cdf[-1] = max(self._cdf[-1], 1.0)

    def sample_bits(self, rng: Random) -> int:
        i = bisect_right(self._cdf, rng.random())
        if i >= len(self.atoms):
            i = len(self.atoms) - 1
        return self.atoms[i][0]

    def support(self):
        return list(self.atoms)

    def marginal(self, S: SubsetMask) -> "ExplicitPrior":
        if S.n != self.n:
            raise DimensionMismatch(f"marginal set over {S.n}, prior over {self.n}")
        return ExplicitPrior(
            self.n, [(bits & S.bits, p) for bits, p in self.atoms]
        )

    def to_spec(self) -> dict:
        return {
            "type": "explicit",
            "n": self.n,
            "support": [
                {"elements": sorted(iter_bits(bits)), "prob": str(p)}
                for bits, p in self.atoms
            ],
        }

    def __repr__(self):
        return f"ExplicitPrior(n={self.n}, {len(self.atoms)} atoms)"


class AllActivePrior(ExplicitPrior):
    """Every element active in every draw."""

    def __init__(self, n: int):
        super().__init__(n, [(full_mask(n), Fraction(1))])
        self._full = full_mask(n)

    def sample_bits(self, rng: Random) -> int:
        return self._full

    def to_spec(self) -> dict:
        return {"type": "all_active", "n": self.n}

    def __repr__(self):
        return f"AllActivePrior(n={self.n})"


class ProductPrior(Prior):
    """Each element active independently with its own probability."""

    def __init__(self, x: Sequence):
        super().__init__(len(x))
        self.x = [to_fraction(xi) for xi in x]
        for xi in self.x:
            if not 0 <= xi <= 1:
                raise PriorError(f"activation probability {xi} outside [0,1]")
        self._xf = [float(xi) for xi in self.x]

    def sample_bits(self, rng: Random) -> int:
        bits = 0
        for i, xi in enumerate(self._xf):
            if rng.random() < xi:
                bits |= 1 << i
        return bits

    def activation_probabilities(self):
        return list(self.x)

    def support(self):
        if self.n > 16:
            return None
        sup = []
        for bits in range(1 << self.n):
            p = Fraction(1)
            for i, xi in enumerate(self.x):
                p *= xi if (bits >> i) & 1 else 1 - xi
                if p == 0:
                    break
            if p > 0:
                sup.append((bits, p))
        return sup

    def to_explicit(self) -> ExplicitPrior:
        sup = self.support()
        if sup is None:
            raise PriorError(f"product prior over {self.n} elements too large to expand")
        return ExplicitPrior(self.n, sup)

    def marginal(self, S: SubsetMask) -> "ProductPrior":
        if S.n != self.n:
            raise DimensionMismatch(f"marginal set over {S.n}, prior over {self.n}")
        return ProductPrior(
            [xi if (S.bits >> i) & 1 else Fraction(0) for i, xi in enumerate(self.x)]
        )

    def to_spec(self) -> dict:
        return {"type": "product", "x": [str(xi) for xi in self.x]}

    def __repr__(self):
        return f"ProductPrior(x={[str(xi) for xi in self.x]})"


class SamplerPrior(Prior):
    """Opaque sampler; only p_min estimation is available beyond sampling."""

    def __init__(self, n: int, fn: Callable[[Random], int]):
        super().__init__(n)
        self._fn = fn

    def sample_bits(self, rng: Random) -> int:
        return self._fn(rng) & full_mask(self.n)

    def p_min(self, rng: Optional[Random] = None, eps: float = 0.05) -> float:
        """Lower-confidence estimate: empirical frequency minus eps, from
        ceil(3 ln(2n/0.01) / eps^2) samples. Aborts if some element never
        shows up, since every downstream guarantee divides by p_min."""
        if rng is None:
            raise PriorError("p_min estimation needs an rng")
        m = math.ceil(3 * math.log(2 * self.n / 0.01) / eps**2)
        counts = [0] * self.n
        for _ in range(m):
            bits = self.sample_bits(rng)
            for e in iter_bits(bits):
                counts[e] += 1
        floor = min(max(c / m - eps, 0.0) for c in counts)
        if floor <= 0:
            never = [e for e, c in enumerate(counts) if c == 0]
            raise PriorError(
                f"p_min estimate hit 0 (elements {never or 'several'} too rare "
                f"in {m} samples); every element must be active with positive probability"
            )
        return floor


class _MarginalSamplerPrior(Prior):
    def __init__(self, parent: Prior, keep_bits: int):
        super().__init__(parent.n)
        self._parent = parent
        self._keep = keep_bits

    def sample_bits(self, rng: Random) -> int:
        return self._parent.sample_bits(rng) & self._keep


def hidden_element_prior(n: int, alpha, delta, j: int) -> ExplicitPrior:
    """Correlated prior whose element j is active only when everything is.

    Mass 1 - delta*(n + 1/alpha - 2) on the empty set, delta*(1/alpha - 1)
    on the full set, and delta on each singleton {i} for i != j. For the
    1-uniform matroid this is alpha-uncontentious, yet
    p_min = delta*(1/alpha - 1) can be made arbitrarily small.
    """
    alpha = to_fraction(alpha)
    delta = to_fraction(delta)
    if not 0 < alpha < 1:
        raise PriorError(f"alpha must lie in (0,1), got {alpha}")
    if not 0 <= j < n:
        raise PriorError(f"element j={j} outside ground set of size {n}")
    bound = 1 / (n + 1 / alpha - 2)
    if not 0 < delta <= bound:
        raise PriorError(f"delta must lie in (0, {bound}], got {delta}")
    atoms: list[tuple[int, Fraction]] = [
        (0, 1 - delta * (n + 1 / alpha - 2)),
        (full_mask(n), delta * (1 / alpha - 1)),
    ]
    atoms += [(1 << i, delta) for i in range(n) if i != j]
    return ExplicitPrior(n, atoms)


def prior_from_spec(spec: dict) -> Prior:
    """Build a prior from its JSON dict form."""
    kind = spec.get("type")
    if kind == "explicit":
        return ExplicitPrior(
            int(spec["n"]),
            [(atom["elements"], atom["prob"]) for atom in spec["support"]],
        )
    if kind == "all_active":
        return AllActivePrior(int(spec["n"]))
    if kind == "product":
        return ProductPrior([to_fraction(x) for x in spec["x"]])
    if kind == "hidden_element":
        return hidden_element_prior(
            int(spec["n"]), spec["alpha"], spec["delta"], int(spec["j"])
        )
    raise ValueError(f"unknown prior type {kind!r}")
