#!/usr/bin/env python3
"""Fixed-point and contraction diagnostics for the simplex operator.

For each (d+, d-) pair: iterate to the fixed point, report phi(p*), check the
degree-gap premise, and measure the contraction ratio on random skewed pairs.
"""

import argparse
import json
import sys

from planted_bisection import (
    contraction_ratio,
    find_fixed_point,
    gap_condition,
    phi_exact,
    sample_skewed,
    wasserstein1,
)
from planted_bisection.rng import derive_rng


def diagnose(d_plus: float, d_minus: float, c: float, pairs: int, seed: int) -> dict:
    res = find_fixed_point(d_plus, d_minus)
    gen = derive_rng(seed, "operator-diagnostics", d_plus)
    ratios = []
    while len(ratios) < pairs:
        p, q = sample_skewed(gen, d_plus), sample_skewed(gen, d_plus)
        if wasserstein1(p, q) > 0:
            ratios.append(contraction_ratio(p, q, d_plus, d_minus))
    lhs, rhs, holds = gap_condition(d_plus, d_minus, c)
    return {
        "d_plus": d_plus,
        "d_minus": d_minus,
        "p_star": list(res.p_star.as_tuple()),
        "iterations": res.iterations,
        "converged": res.converged,
        "skewed": res.skewed,
        "phi_star": phi_exact(res.p_star, d_plus, d_minus),
        "gap_lhs": lhs,
        "gap_rhs": rhs,
        "gap_condition_holds": holds,
        "max_contraction_ratio": max(ratios),
        "contraction_below_half": all(r <= 0.5 + 1e-6 for r in ratios),
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", default="50:1,200:1", help="comma list of d+:d- pairs")
    ap.add_argument("--c", type=float, default=4.0)
    ap.add_argument("--pairs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="operator_diagnostics.json")
    args = ap.parse_args()

    results = []
    for token in args.points.split(","):
        d_plus, d_minus = (float(x) for x in token.split(":"))
        row = diagnose(d_plus, d_minus, args.c, args.pairs, args.seed)
        results.append(row)
        print(
            f"(d+={d_plus}, d-={d_minus}): phi* = {row['phi_star']:.9f}, "
            f"skewed = {row['skewed']}, gap holds = {row['gap_condition_holds']}, "
            f"max ratio = {row['max_contraction_ratio']:.2e}"
        )
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(results, fh, indent=2)
        fh.write("\n")
    print(f"written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
