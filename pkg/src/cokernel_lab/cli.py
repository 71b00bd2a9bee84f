"""Command line interface: every engine behind one binary with JSON output
on stdout, human summaries on stderr, and reproducible seeding."""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .algebra import LocalRingSpec, Poly, RingSpec
from .measure import (
    MeasureValue,
    divisor_density,
    divisor_density_hypothesis,
    eta,
    local_ring_with_residue_size,
    moment_rank,
    mu,
    rank_distribution,
    rank_distribution_partition_form,
)
from .modules import ModuleType, Partition
from .montecarlo import SampleConfig, sample_cokernels, tv_distance

SCHEMA_VERSION = 1


def parse_poly_text(text: str, l: int, a=None) -> Poly:
    """Parse human polynomial syntax like "X^2+2", "X-1", or "X-a" (with the
    symbol a supplied separately)."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    if a is not None:
        s = re.sub(r"\ba\b", str(a), s)
    terms = re.findall(r"[+-]?[^+-]+", s)
    coeffs: dict[int, int] = {}
    for term in terms:
        m = re.fullmatch(r"([+-]?)(\d+)?\*?(X(?:\^(\d+))?)?", term, re.IGNORECASE)
        if not m or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"cannot parse polynomial term {term!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = int(m.group(2)) if m.group(2) is not None else 1
        if m.group(3) is None:
            deg = 0
        elif m.group(4) is not None:
            deg = int(m.group(4))
        else:
            deg = 1
        coeffs[deg] = coeffs.get(deg, 0) + sign * coeff
    out = [0] * (max(coeffs) + 1)
    for deg, c in coeffs.items():
        out[deg] = c % l
    return Poly(l, out)


def poly_json(p: Poly) -> dict:
    return {"l": p.l, "coeffs": list(p.coeffs)}


def parse_ring_json(data) -> RingSpec:
    if isinstance(data, str):
        data = json.loads(data)
    l = data["l"]
    factors = tuple(
        LocalRingSpec(l, Poly(l, f["p"]), f["e"]) for f in data["factors"]
    )
    return RingSpec(factors)


def ring_json(ring: RingSpec) -> dict:
    return {
        "l": ring.l,
        "factors": [{"p": list(f.p.coeffs), "e": f.e} for f in ring.factors],
    }


def measure_value_json(v: MeasureValue) -> dict:
    return {
        "rational": f"{v.rational.numerator}/{v.rational.denominator}",
        "eta_factors": list(v.eta_factors),
        "value": v.numeric(),
    }


def module_type_json(t: ModuleType) -> dict:
    return {
        "ring": ring_json(t.ring),
        "types": [list(lam.parts) for lam in t.local_types],
    }


def _manifest(subcommand: str, config: dict, seed=None, hypotheses=None, timestamps=True):
    now = datetime.now(timezone.utc).isoformat() if timestamps else None
    return {
        "subcommand": subcommand,
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "config": config,
        "hypotheses": hypotheses or {},
        "started": now,
        "finished": now,
    }


def _emit(manifest: dict, result: dict, summary: str) -> None:
    if manifest.get("started") is not None:
        manifest["finished"] = datetime.now(timezone.utc).isoformat()
    json.dump({"manifest": manifest, "result": result}, sys.stdout, default=str)
    sys.stdout.write("\n")
    print(summary, file=sys.stderr)


def _cmd_eta(args) -> int:
    ev = eta(args.Q, args.tol)
    manifest = _manifest("eta", {"Q": args.Q, "tol": args.tol})
    _emit(
        manifest,
        {"value": ev.value, "depth": ev.depth, "tol": ev.tol},
        f"eta({args.Q}) = {ev.value:.9f} (depth {ev.depth})",
    )
    return 0


def _cmd_measure(args) -> int:
    ring = parse_ring_json(args.ring)
    types = json.loads(args.types)
    t = ModuleType(ring, tuple(Partition(tuple(x)) for x in types))
    v = mu(t)
    manifest = _manifest("measure", {"ring": ring_json(ring), "types": types})
    _emit(
        manifest,
        measure_value_json(v),
        f"mu = {v.rational} * eta{list(v.eta_factors)} = {v.numeric():.9f}",
    )
    return 0


def _cmd_rank_dist(args) -> int:
    if args.p is not None:
        p = parse_poly_text(args.p, args.l, args.a)
        local = LocalRingSpec(args.l, p, args.e)
    else:
        local = local_ring_with_residue_size(args.Q, args.e)
    v = rank_distribution(local, args.m)
    pf = rank_distribution_partition_form(
        local.Q, local.e, args.m, local.residue_degree
    )
    if v != pf:
        raise AssertionError("partition form disagrees with the direct sum")
    manifest = _manifest(
        "rank-dist",
        {"l": local.l, "p": list(local.p.coeffs), "e": local.e, "m": args.m},
    )
    _emit(
        manifest,
        measure_value_json(v),
        f"rank mass = {v.rational} * eta({local.Q}) = {v.numeric():.9f}",
    )
    return 0


def _cmd_moments(args) -> int:
    value = moment_rank(args.Q, args.e, args.k)
    manifest = _manifest("moments", {"Q": args.Q, "e": args.e, "k": args.k})
    _emit(manifest, {"moment": value}, f"moment_{args.k} = {value}")
    return 0


def _parse_conditions(args):
    conds = []
    for spec in args.cond:
        if ":" not in spec:
            raise ValueError(f"condition {spec!r} must look like 'X-1:0'")
        text, mult = spec.rsplit(":", 1)
        conds.append((parse_poly_text(text, args.l, args.a), int(mult)))
    return conds


def _cmd_density(args) -> int:
    conds = _parse_conditions(args)
    v = divisor_density(args.l, conds)
    hyp = divisor_density_hypothesis(args.l, conds)
    if not hyp:
        print("warning: prod eta(F_i) <= 1/2, uniqueness not guaranteed", file=sys.stderr)
    manifest = _manifest(
        "density",
        {
            "l": args.l,
            "conditions": [
                {"p": list(p.coeffs), "m": m} for p, m in conds
            ],
        },
        hypotheses={"eta_product_gt_half": hyp},
    )
    result = measure_value_json(v)
    result["hypothesis_eta_gt_half"] = hyp
    _emit(manifest, result, f"density = {v.rational} * eta = {v.numeric():.6f}")
    return 0


def _cmd_simulate_cokernel(args) -> int:
    ring = parse_ring_json(args.ring)
    cfg = SampleConfig(
        ring,
        args.n,
        args.trials,
        args.seed,
        mode="exhaustive" if args.exhaustive else "random",
        workers=args.workers,
    )
    import time

    t0 = time.monotonic()
    dist = sample_cokernels(cfg)
    tv, deficit, theory = tv_distance(dist)
    runtime_ms = int((time.monotonic() - t0) * 1000)
    counts = [
        {
            "types": [list(lam.parts) for lam in t.local_types],
            "count": c,
            "empirical": c / dist.total,
            "theoretical": theory.get(t, 0.0),
        }
        for t, c in sorted(
            dist.counts.items(), key=lambda kv: (-kv[1], str(kv[0]))
        )
    ]
    if args.emit_csv:
        with open(args.emit_csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["type", "empirical", "theoretical"])
            for row in counts:
                w.writerow([json.dumps(row["types"]), row["empirical"], row["theoretical"]])
    manifest = _manifest(
        "simulate-cokernel",
        {
            "ring": ring_json(ring),
            "n": args.n,
            "trials": args.trials,
            "mode": cfg.mode,
            "workers": args.workers,
        },
        seed=args.seed,
    )
    _emit(
        manifest,
        {
            "counts": counts,
            "total": dist.total,
            "tv_vs_theory": tv,
            "truncation_deficit": deficit,
            "runtime_ms": runtime_ms,
        },
        f"{dist.total} samples, TV = {tv:.4f}, deficit = {deficit:.2e}",
    )
    return 0


def _cmd_simulate_curves(args) -> int:
    from .curves import divisibility_stats

    conds = _parse_conditions(args)
    rows = []

    def on_sample(sample, mults):
        rows.append(
            [
                json.dumps(list(sample.f)),
                json.dumps(list(sample.char_poly)),
                json.dumps(list(Poly(args.l, sample.char_poly).coeffs)),
                json.dumps(list(mults)),
            ]
        )

    report = divisibility_stats(
        args.l,
        conds,
        args.q,
        args.g,
        args.trials,
        args.seed,
        workers=args.workers,
        exhaustive=args.exhaustive,
        on_sample=on_sample if args.emit_csv else None,
    )
    if args.emit_csv:
        with open(args.emit_csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["f", "char_poly", "char_poly_mod_l", "multiplicities"])
            w.writerows(rows)
    manifest = _manifest(
        "simulate-curves",
        {
            "l": args.l,
            "q": args.q,
            "g": args.g,
            "conditions": [{"p": list(p.coeffs), "m": m} for p, m in conds],
            "trials": args.trials,
            "exhaustive": args.exhaustive,
            "workers": args.workers,
        },
        seed=args.seed,
        hypotheses={"eta_product_gt_half": report.hypothesis_eta_gt_half},
    )
    _emit(
        manifest,
        {
            "trials": report.trials,
            "hits": report.hits,
            "empirical": report.empirical,
            "predicted": measure_value_json(report.predicted),
            "std_error": report.std_error,
        },
        f"empirical = {report.empirical:.4f}, predicted = {report.predicted_value:.4f} "
        f"(se {report.std_error:.4f})",
    )
    return 0


def _cmd_verify(args) -> int:
    from .verify import run_suite

    checks = run_suite(args.suite, args.seed)
    ok = all(c["passed"] for c in checks)
    manifest = _manifest(
        "verify", {"suite": args.suite}, seed=args.seed, timestamps=False
    )
    _emit(
        manifest,
        {"suite": args.suite, "checks": checks, "passed": ok},
        "\n".join(
            f"[{'PASS' if c['passed'] else 'FAIL'}] {c['name']}: {c['detail']}"
            for c in checks
        ),
    )
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cokernel-lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eta", help="evaluate eta(Q) with a certified tail")
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_eta)

    p = sub.add_parser("measure", help="mass of a module isomorphism class")
    p.add_argument("--ring", required=True)
    p.add_argument("--types", required=True)
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("rank-dist", help="mass of an F_l-dimension stratum")
    p.add_argument("--l", type=int, default=3)
    p.add_argument("--p", default=None)
    p.add_argument("--Q", type=int, default=None)
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=_cmd_rank_dist)

    p = sub.add_parser("moments", help="moments of Q^rank (submodule counts)")
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("density", help="divisor multiplicity densities")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--cond", action="append", required=True)
    p.add_argument("--a", type=int, default=None)
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("simulate", help="empirical harnesses")
    sim = p.add_subparsers(dest="simulate_what", required=True)

    pc = sim.add_parser("cokernel", help="random matrix cokernel sampling")
    pc.add_argument("--ring", required=True)
    pc.add_argument("--n", type=int, required=True)
    pc.add_argument("--trials", type=int, default=0)
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--exhaustive", action="store_true")
    pc.add_argument("--workers", type=int, default=1)
    pc.add_argument("--emit-csv", dest="emit_csv", default=None)
    pc.set_defaults(func=_cmd_simulate_cokernel)

    pv = sim.add_parser("curves", help="hyperelliptic divisor statistics")
    pv.add_argument("--l", type=int, required=True)
    pv.add_argument("--q", type=int, required=True)
    pv.add_argument("--g", type=int, required=True)
    pv.add_argument("--cond", action="append", required=True)
    pv.add_argument("--a", type=int, default=None)
    pv.add_argument("--trials", type=int, default=0)
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--exhaustive", action="store_true")
    pv.add_argument("--workers", type=int, default=1)
    pv.add_argument("--emit-csv", dest="emit_csv", default=None)
    pv.set_defaults(func=_cmd_simulate_curves)

    p = sub.add_parser("verify", help="run the oracle check suites")
    p.add_argument("--suite", choices=["exact", "montecarlo", "curves-small"], required=True)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return 0 if ex.code == 0 else 1
    try:
        return args.func(args)
    except (ValueError, KeyError, json.JSONDecodeError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1
    except Exception as ex:  # internal assertion
        print(f"internal error: {ex}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
