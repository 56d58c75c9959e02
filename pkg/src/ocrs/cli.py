"""Batch experiment front end.

Subcommands: gen-instance, preselect, run, evaluate, oracle-alpha, lp-build.
Identical seed and flags give byte-identical outputs. Exit codes: 0 success,
1 preselection found no qualifying element (partial artifacts are still
written), 2 bad configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from random import Random

from .harness import Instance, estimate_balancedness, parse_instance
from .lp import build_lp_scheme, build_secretary_reduction
from .oracle import max_uncontentious_alpha
from .preselect import NoQualifyingElement, PreselectConfig
from .sampling import Permutation
from .schemes import (
    OrderedGreedy,
    build_independent_subsampling_scheme,
    build_prefix_subsampling_scheme,
    scheme_from_spec,
)


def _write_json(payload: dict, out: str | None, suffix: str = ".json") -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out + suffix, "w") as f:
            f.write(text + "\n")
    else:
        print(text)


def _preselect_cfg(args, inst: Instance) -> PreselectConfig:
    alpha = Fraction(args.alpha) if args.alpha else inst.declared_alpha
    mode = "exact" if args.mode == "exact" else "monte_carlo"
    return PreselectConfig(
        alpha=float(alpha), eps=args.eps, mode=mode, sample_override=args.samples
    )


def _build_scheme(args, inst: Instance, rng: Random):
    name = args.scheme
    if name.endswith(".json"):
        with open(name) as f:
            return scheme_from_spec(json.load(f))
    order = None
    if args.order == "canonical":
        if inst.canonical_order is None:
            raise ValueError(f"instance {inst.name} has no canonical order")
        order = inst.canonical_order
    alpha = Fraction(args.alpha) if args.alpha else inst.declared_alpha
    cfg = _preselect_cfg(args, inst)
    if name in ("indep", "indep-subsample"):
        return build_independent_subsampling_scheme(
            inst.matroid, inst.prior, alpha, rng, cfg=cfg, order=order
        )
    if name in ("prefix", "prefix-subsample"):
        return build_prefix_subsampling_scheme(
            inst.matroid, inst.prior, alpha, rng, cfg=cfg, order=order
        )
    if name == "greedy":
        return OrderedGreedy(order or Permutation.identity(inst.matroid.n))
    raise ValueError(f"unknown scheme {name!r} (use indep, prefix, greedy, or a scheme JSON path)")


def cmd_gen_instance(args) -> int:
    inst = parse_instance(args.instance)
    _write_json(inst.to_spec(), args.out)
    return 0


def cmd_preselect(args) -> int:
    inst = parse_instance(args.instance)
    rng = Random(args.seed)
    cfg = _preselect_cfg(args, inst)
    kind = args.kind
    build = (
        build_independent_subsampling_scheme
        if kind == "indep"
        else build_prefix_subsampling_scheme
    )
    alpha = Fraction(args.alpha) if args.alpha else inst.declared_alpha
    try:
        scheme = build(inst.matroid, inst.prior, alpha, rng, cfg=cfg)
    except NoQualifyingElement as err:
        print(f"warning: {err}; emitting empty selection behaviour", file=sys.stderr)
        _write_json(
            {"instance": inst.name, "failed_at_step": err.step, "partial_order": err.suffix},
            args.out,
        )
        return 1
    _write_json(
        {"instance": inst.name, "kind": kind, "order": list(scheme.order.order)}, args.out
    )
    return 0


def cmd_run(args) -> int:
    inst = parse_instance(args.instance)
    rng = Random(args.seed)
    try:
        scheme = _build_scheme(args, inst, rng)
    except NoQualifyingElement as err:
        print(f"warning: {err}; selecting nothing", file=sys.stderr)
        _write_json({"instance": inst.name, "active": None, "selected": []}, args.out)
        return 1
    a = inst.prior.sample(rng)
    x = scheme.run(inst.matroid, a, rng)
    _write_json(
        {
            "instance": inst.name,
            "scheme": scheme.to_spec(),
            "active": a.elements(),
            "selected": x.elements(),
        },
        args.out,
    )
    return 0


def cmd_evaluate(args) -> int:
    inst = parse_instance(args.instance)
    rng = Random(args.seed)
    try:
        scheme = _build_scheme(args, inst, rng)
    except NoQualifyingElement as err:
        print(f"warning: {err}; nothing to evaluate", file=sys.stderr)
        _write_json({"instance": inst.name, "failed_at_step": err.step}, args.out)
        return 1
    report = estimate_balancedness(
        inst.matroid,
        scheme,
        inst.prior,
        trials=args.trials,
        rng=rng,
        ci_level=args.ci_level,
        metadata={
            "instance": inst.name,
            "scheme": scheme.to_spec(),
            "seed": args.seed,
        },
    )
    if args.out:
        report.write_csv(args.out + ".csv")
        _write_json(report.to_json(), args.out)
    else:
        print("\n".join(report.csv_lines()))
    return 0


def cmd_oracle_alpha(args) -> int:
    inst = parse_instance(args.instance)
    cert = max_uncontentious_alpha(inst.matroid, inst.prior)
    payload = cert.to_json()
    payload["instance"] = inst.name
    payload["alpha_star_float"] = float(cert.alpha_star)
    _write_json(payload, args.out)
    return 0


def cmd_lp_build(args) -> int:
    inst = parse_instance(args.instance)
    rng = Random(args.seed)
    alpha = float(Fraction(args.alpha)) if args.alpha else float(inst.declared_alpha)
    if args.reduction == "permutation":
        scheme, report = build_lp_scheme(
            inst.matroid, inst.prior, eps=args.eps, rng=rng,
            mode=args.mode, alpha_target=alpha,
        )
    else:
        scheme, report = build_secretary_reduction(
            inst.matroid, inst.prior, secretary_kind=args.secretary,
            c=args.competitiveness, eps=args.eps, rng=rng,
            mode=args.mode, alpha_target=alpha,
        )
    payload = {
        "instance": inst.name,
        "scheme": scheme.to_spec(),
        "report": report.to_json(),
    }
    _write_json(payload, args.out)
    if args.out:
        _write_json(scheme.to_spec(), args.out + ".scheme")
    return 0


def _add_common(p: argparse.ArgumentParser, trials: bool = False) -> None:
    p.add_argument("--instance", required=True, help="instance shorthand or JSON path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--alpha", default=None, help="override the instance's declared level")
    p.add_argument("--mode", choices=["exact", "mc", "auto"], default="mc")
    p.add_argument("--samples", type=int, default=None, help="override per-step sample count")
    p.add_argument("--out", default=None, help="output path prefix (stdout if omitted)")
    if trials:
        p.add_argument("--trials", type=int, default=10000)
        p.add_argument("--ci-level", type=float, default=0.99)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ocrs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-instance", help="emit an instance JSON")
    _add_common(p)
    p.set_defaults(fn=cmd_gen_instance)

    p = sub.add_parser("preselect", help="preselect an arrival order")
    _add_common(p)
    p.add_argument("--kind", choices=["indep", "prefix"], default="indep")
    p.set_defaults(fn=cmd_preselect)

    p = sub.add_parser("run", help="one online draw")
    _add_common(p)
    p.add_argument("--scheme", required=True)
    p.add_argument("--order", choices=["preselect", "canonical"], default="preselect")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("evaluate", help="balancedness report over many trials")
    _add_common(p, trials=True)
    p.add_argument("--scheme", required=True)
    p.add_argument("--order", choices=["preselect", "canonical"], default="preselect")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("oracle-alpha", help="exact best-achievable balancedness")
    _add_common(p)
    p.set_defaults(fn=cmd_oracle_alpha)

    p = sub.add_parser("lp-build", help="column-generation scheme build")
    _add_common(p)
    p.add_argument("--reduction", choices=["permutation", "secretary"], default="permutation")
    p.add_argument("--secretary", choices=["greedy_by_weight", "classic_1uniform"],
                   default="greedy_by_weight")
    p.add_argument("--competitiveness", type=float, default=1.0,
                   help="claimed competitiveness of the secretary algorithm")
    p.set_defaults(fn=cmd_lp_build)
    return parser


def cli_run(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_run())


if __name__ == "__main__":
    main()
