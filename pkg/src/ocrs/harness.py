"""Experiment harness: named instances, tight-instance generators,
balancedness estimation with Hoeffding intervals, and competitiveness
measurement for secretary algorithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Optional

from .bitset import SubsetMask, iter_bits
from .matroid import GraphicMatroid, ExplicitMatroid, Matroid, UniformMatroid, matroid_from_spec
from .priors import (
    AllActivePrior,
    ExplicitPrior,
    Prior,
    hidden_element_prior,
    prior_from_spec,
    to_fraction,
)
from .sampling import Permutation
from .schemes import Scheme, secretary_wrap_bits, SECRETARY_KINDS


@dataclass
class Instance:
    """A matroid/prior pair with its claimed uncontentiousness level.

    `canonical_order` is the arrival order under which the instance is
    known to be tight, when there is one; generators fill it in.
    """

    name: str
    matroid: Matroid
    prior: Prior
    declared_alpha: Fraction
    canonical_order: Optional[Permutation] = None
    provenance: str = ""

    def to_spec(self) -> dict:
        spec = {
            "name": self.name,
            "matroid": self.matroid.to_spec(),
            "prior": self.prior.to_spec(),
            "declared_alpha": str(self.declared_alpha),
            "provenance": self.provenance,
        }
        if self.canonical_order is not None:
            spec["canonical_order"] = list(self.canonical_order.order)
        return spec

    @classmethod
    def from_spec(cls, spec: dict) -> "Instance":
        order = spec.get("canonical_order")
        return cls(
            name=spec.get("name", "instance"),
            matroid=matroid_from_spec(spec["matroid"]),
            prior=prior_from_spec(spec["prior"]),
            declared_alpha=to_fraction(spec["declared_alpha"]),
            canonical_order=None if order is None else Permutation(order),
            provenance=spec.get("provenance", ""),
        )


def gen_kuniform_allactive(n: int, k: int) -> Instance:
    """k-uniform matroid, everything always active; tight for the
    prefix-subsampling scheme at level k/n."""
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= k <= n-1, got k={k}, n={n}")
    return Instance(
        name=f"kuniform:{n},{k}",
        matroid=UniformMatroid(n, k),
        prior=AllActivePrior(n),
        declared_alpha=Fraction(k, n),
        canonical_order=Permutation.identity(n),
        provenance="uniform tight instance",
    )


def hats_count(alpha: Fraction) -> int:
    """Largest m with (1 - a/2)(1 - a^2/4)^m >= a/2, computed exactly."""
    alpha = to_fraction(alpha)
    lhs = 1 - alpha / 2
    decay = 1 - alpha * alpha / 4
    m = 0
    while lhs * decay ** (m + 1) >= alpha / 2:
        m += 1
    return m


def gen_parallel_hats(alpha, m_override: Optional[int] = None) -> Instance:
    """Bundle of 1/alpha parallel edges plus a chain of edge 'hats' over a
    shared base edge, all always active; tight for the
    independent-subsampling scheme.

    Edge indices follow the canonical tight order: hat tops, hat bottoms,
    the base edge, then the parallel bundle; so the canonical order is the
    identity. `m_override` forces the hat count (handy for small variants).
    """
    alpha = to_fraction(alpha)
    if not 0 < alpha <= Fraction(1, 2):
        raise ValueError(f"alpha must lie in (0, 1/2], got {alpha}")
    inv = 1 / alpha
    if inv.denominator != 1:
        raise ValueError(f"1/alpha must be an integer, got {inv}")
    npar = int(inv)
    m = hats_count(alpha) if m_override is None else int(m_override)
    u, uprime = 0, 1  # hat tips; spoke vertices are 2..m+1
    w, wprime = 2 + m, 3 + m
    edges = [(2 + i, u) for i in range(m)]
    edges += [(2 + i, uprime) for i in range(m)]
    edges.append((u, uprime))
    edges += [(w, wprime)] * npar
    n = len(edges)
    return Instance(
        name=f"parallel-hats:{alpha}" + (f",m={m}" if m_override is not None else ""),
        matroid=GraphicMatroid(4 + m, edges),
        prior=AllActivePrior(n),
        declared_alpha=alpha,
        canonical_order=Permutation.identity(n),
        provenance=f"graphic tight instance, {m} hats, {npar} parallel edges",
    )


def two_element_instance() -> Instance:
    """Two mutually exclusive elements, active together half the time; the
    smallest instance where every element is always spanned by the rest of
    the active set, yet level 1/2 is achievable offline."""
    return Instance(
        name="twoelem",
        matroid=ExplicitMatroid(2, [[], [0], [1]]),
        prior=ExplicitPrior(2, [(0b11, Fraction(1, 2)), (0, Fraction(1, 2))]),
        declared_alpha=Fraction(1, 2),
        canonical_order=Permutation.identity(2),
        provenance="coupled two-element example",
    )


def gen_hidden_element(n: int, alpha, delta, j: int) -> Instance:
    """1-uniform matroid with the hidden-element prior; p_min shrinks with
    delta while the declared level stays alpha."""
    alpha = to_fraction(alpha)
    return Instance(
        name=f"hidden:{n},{alpha},{to_fraction(delta)},{j}",
        matroid=UniformMatroid(n, 1),
        prior=hidden_element_prior(n, alpha, delta, j),
        declared_alpha=alpha,
        provenance="hidden-element prior on 1-uniform",
    )


def parse_instance(text: str) -> Instance:
    """Shorthand parser: 'kuniform:N,K', 'twoelem', 'parallel-hats:ALPHA',
    'hidden:N,ALPHA,DELTA,J', or a path to an instance JSON file."""
    if text.endswith(".json"):
        import json

        with open(text) as f:
            return Instance.from_spec(json.load(f))
    name, _, args = text.partition(":")
    name = name.replace("_", "-")
    if name == "kuniform":
        n, k = (int(v) for v in args.split(","))
        return gen_kuniform_allactive(n, k)
    if name == "twoelem":
        return two_element_instance()
    if name == "parallel-hats":
        parts = args.split(",")
        m_override = None
        for p in parts[1:]:
            key, _, val = p.partition("=")
            if key == "m":
                m_override = int(val)
        return gen_parallel_hats(Fraction(parts[0]) if "/" in parts[0] else parts[0], m_override)
    if name == "hidden":
        n, alpha, delta, j = args.split(",")
        return gen_hidden_element(int(n), alpha, delta, int(j))
    raise ValueError(f"unknown instance spec {text!r}")


# -- balancedness estimation -------------------------------------------------


@dataclass
class ElementEstimate:
    element: int
    active_count: int
    selected_count: int
    estimate: Optional[float]
    ci_lo: Optional[float]
    ci_hi: Optional[float]


@dataclass
class BalancednessReport:
    trials: int
    ci_level: float
    elements: list[ElementEstimate]
    metadata: dict = field(default_factory=dict)

    def min_estimate(self) -> Optional[float]:
        vals = [e.estimate for e in self.elements if e.estimate is not None]
        return min(vals) if vals else None

    def csv_lines(self) -> list[str]:
        lines = ["element,active_count,selected_count,estimate,ci_lo,ci_hi"]
        for e in self.elements:
            if e.estimate is None:
                lines.append(f"{e.element},{e.active_count},{e.selected_count},,,")
            else:
                lines.append(
                    f"{e.element},{e.active_count},{e.selected_count},"
                    f"{e.estimate!r},{e.ci_lo!r},{e.ci_hi!r}"
                )
        return lines

    def write_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("\n".join(self.csv_lines()) + "\n")

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "ci_level": self.ci_level,
            "min_estimate": self.min_estimate(),
            "metadata": self.metadata,
            "elements": [
                {
                    "element": e.element,
                    "active_count": e.active_count,
                    "selected_count": e.selected_count,
                    "estimate": e.estimate,
                    "ci_lo": e.ci_lo,
                    "ci_hi": e.ci_hi,
                }
                for e in self.elements
            ],
        }


def hoeffding_halfwidth(level: float, count: int) -> float:
    return math.sqrt(math.log(2 / (1 - level)) / (2 * count))


def estimate_balancedness(
    M: Matroid,
    scheme: Scheme,
    P: Prior,
    trials: int,
    rng: Random,
    ci_level: float = 0.99,
    metadata: Optional[dict] = None,
) -> BalancednessReport:
    """Run the scheme's run phase on fresh active sets and report, per
    element, the conditional selection frequency with a two-sided
    Hoeffding interval. Elements never seen active get a no-data row."""
    if trials < 1:
        raise ValueError("need at least one trial")
    n = M.n
    act = [0] * n
    sel = [0] * n
    sample = P.sample_bits
    run = scheme.run_bits
    for _ in range(trials):
        a = sample(rng)
        x = run(M, a, rng)
        for e in iter_bits(a):
            act[e] += 1
        for e in iter_bits(x):
            sel[e] += 1
    elements = []
    for e in range(n):
        if act[e] == 0:
            elements.append(ElementEstimate(e, 0, 0, None, None, None))
            continue
        est = sel[e] / act[e]
        hw = hoeffding_halfwidth(ci_level, act[e])
        elements.append(
            ElementEstimate(e, act[e], sel[e], est, max(0.0, est - hw), min(1.0, est + hw))
        )
    return BalancednessReport(
        trials=trials, ci_level=ci_level, elements=elements, metadata=metadata or {}
    )


def measure_competitiveness(
    M: Matroid, secretary_kind: str, w, trials: int, rng: Random
) -> float:
    """Average ratio of the secretary algorithm's selected weight to the
    offline optimum, over fresh arrival orders (no active-set masking)."""
    if secretary_kind not in SECRETARY_KINDS:
        raise ValueError(f"unknown secretary kind {secretary_kind!r}")
    full = SubsetMask.full(M.n)
    opt = float(M.weighted_rank(w, full))
    if opt <= 0:
        raise ValueError("offline optimum is zero; competitiveness undefined")
    total = 0.0
    for _ in range(trials):
        chosen = secretary_wrap_bits(secretary_kind, w, M, full.bits, rng)
        total += sum(w[e] for e in iter_bits(chosen))
    return total / trials / opt
