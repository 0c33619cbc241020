"""Command-line interface.

Subcommands: generate, wp-run, fixed-point, gw-validate, census,
oracle-compare, end-to-end, sweep.  Outputs are JSON or CSV; every
subcommand takes --seed, --out and --threads.  Exit codes: 0 success,
2 config/input error, 3 enumeration/sampling budget exceeded, 4 hard
assertion failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys

import numpy as np

from .core import CoreParams, extract_core, restrict_assignment
from .errors import BudgetError, ConfigError
from .experiment import (
    ExperimentConfig,
    load_config,
    run_end_to_end,
    sweep,
    sweep_csv,
)
from .fixed_point import find_fixed_point, gap_condition, phi_exact, apply_T_exact
from .graphs import (
    FrozenAssignment,
    ModelParams,
    load_graph,
    planted_cut_width,
    sample_planted_graph,
    store_graph,
)
from .gw import CYCLIC_BUCKET, neighborhood_census, root_message_distribution
from .oracle import min_bisection_exact, min_cut_extension
from .wp import bisection_estimate, init_messages, wp_step

__all__ = ["main", "build_parser"]


def _write_out(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p.add_argument("--out", type=str, default=None, help="output path (default: stdout)")
    p.add_argument("--threads", type=int, default=1, help="worker threads (results are thread-count independent)")


def _seed(args) -> int:
    return args.seed if args.seed is not None else 0


def _apply_threads(threads: int) -> None:
    if threads > 1:
        try:
            import numba

            numba.set_num_threads(threads)
        except Exception:
            pass


def _cmd_generate(args) -> int:
    params = ModelParams(args.n, args.d_plus, args.d_minus, _seed(args))
    g, a = sample_planted_graph(params)
    if not args.out:
        raise ConfigError("generate requires --out (graph file path)")
    store_graph(g, a, args.out)
    sys.stdout.write(
        json.dumps({"n": g.n, "m": g.num_edges, "planted_width": planted_cut_width(g, a)}) + "\n"
    )
    return 0


def _load_frozen_file(path: str, n: int) -> FrozenAssignment:
    values = np.zeros(n, dtype=np.int8)
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh.read().splitlines(), 1):
            parts = raw.split()
            if len(parts) != 2:
                raise ConfigError(f"{path}:{lineno}: expected 'vertex sign'")
            v, s = int(parts[0]), int(parts[1])
            if not 0 <= v < n or s not in (-1, 1):
                raise ConfigError(f"{path}:{lineno}: bad vertex or sign")
            values[v] = s
    return FrozenAssignment(values)


def _cmd_wp_run(args) -> int:
    g, a = load_graph(args.graph)
    if args.init == "full-sigma":
        f = FrozenAssignment.from_assignment(a)
    elif args.init == "core-sigma":
        if args.d_plus is None or args.d_minus is None:
            raise ConfigError("--init core-sigma requires --d-plus and --d-minus")
        params = ModelParams(g.n, args.d_plus, args.d_minus, _seed(args))
        core = extract_core(g, a, params, CoreParams(args.c, args.outside_cap))
        if args.dump_core:
            with open(args.dump_core, "w", encoding="ascii", newline="\n") as fh:
                fh.writelines(f"{v}\n" for v in core.members.tolist())
        f = restrict_assignment(a, core.members)
    else:
        if not args.init_file:
            raise ConfigError("--init file requires --init-file")
        f = _load_frozen_file(args.init_file, g.n)
    state = init_messages(g, f)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "estimate", "normalized_estimate"])
    est = bisection_estimate(g, state)
    writer.writerow([0, est, est / g.n])
    for _ in range(args.rounds):
        state = wp_step(g, state)
        est = bisection_estimate(g, state)
        writer.writerow([state.t, est, est / g.n])
    _write_out(buf.getvalue(), args.out)
    return 0


def _cmd_fixed_point(args) -> int:
    result = find_fixed_point(args.d_plus, args.d_minus, args.eps, tail_tol=args.tail_tol)
    phi = phi_exact(result.p_star, args.d_plus, args.d_minus, args.tail_tol)
    _, _, holds = gap_condition(args.d_plus, args.d_minus, args.c)
    payload = {
        "p_star": list(result.p_star.as_tuple()),
        "phi_star": phi,
        "iterations": result.iterations,
        "converged": result.converged,
        "skewed": result.skewed,
        "gap_condition_holds": holds,
    }
    _write_out(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _iterate_operator(d_plus: float, d_minus: float, t: int):
    from .fixed_point import Dist3

    p = Dist3.point_mass(1)
    for _ in range(t):
        p = apply_T_exact(p, d_plus, d_minus)
    return p


def _cmd_gw_validate(args) -> int:
    empirical = root_message_distribution(
        args.d_plus, args.d_minus, args.t, args.trials, _seed(args)
    )
    theory = _iterate_operator(args.d_plus, args.d_minus, args.t)
    tv = 0.5 * float(np.abs(empirical.as_array() - theory.as_array()).sum())
    payload = {
        "t": args.t,
        "trials": args.trials,
        "empirical": list(empirical.as_tuple()),
        "theory": list(theory.as_tuple()),
        "tv_distance": tv,
    }
    _write_out(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _cmd_census(args) -> int:
    g, a = load_graph(args.graph)
    freqs = neighborhood_census(g, a, args.depth, args.sample_size or None, _seed(args))
    total = args.sample_size if 0 < (args.sample_size or 0) < g.n else g.n
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["code_hash", "count", "frequency"])
    cyclic = freqs.pop(CYCLIC_BUCKET, 0.0)
    for code in sorted(freqs):
        f = freqs[code]
        writer.writerow([hashlib.sha1(code).hexdigest(), round(f * total), f])
    writer.writerow(["cyclic", round(cyclic * total), cyclic])
    _write_out(buf.getvalue(), args.out)
    return 0


def _cmd_oracle_compare(args) -> int:
    g, a = load_graph(args.graph)
    bis, _ = min_bisection_exact(g)
    planted = planted_cut_width(g, a)
    params = ModelParams(g.n, args.d_plus, args.d_minus, _seed(args))
    core = extract_core(g, a, params, CoreParams(args.c, args.outside_cap))
    cut_core, _ = min_cut_extension(g, restrict_assignment(a, core.members))
    payload = {
        "bis": bis,
        "planted_width": planted,
        "core_size": core.size,
        "cut_sigma_c": cut_core,
        "equal_flags": {
            "bis_eq_cut_sigma_c": bis == cut_core,
            "bis_eq_planted": bis == planted,
        },
    }
    _write_out(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _config_from_args(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    for key in ("n", "d_plus", "d_minus", "wp_rounds", "c"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    return cfg


def _cmd_end_to_end(args) -> int:
    record = run_end_to_end(_config_from_args(args))
    _write_out(record.full_json() + "\n", args.out)
    return 0


def _parse_grid_list(text: str | None, caster):
    if not text:
        return None
    return [caster(tok) for tok in text.split(",") if tok.strip()]


def _cmd_sweep(args) -> int:
    base = _config_from_args(args)
    grid = {}
    for axis, caster in (("n", int), ("d_plus", float), ("d_minus", float), ("wp_rounds", int)):
        vals = _parse_grid_list(getattr(args, f"grid_{axis}"), caster)
        if vals:
            grid[axis] = vals
    records = sweep(base, grid)
    _write_out(sweep_csv(records), args.out)
    if args.records_dir:
        import os

        os.makedirs(args.records_dir, exist_ok=True)
        for i, rec in enumerate(records):
            with open(os.path.join(args.records_dir, f"run_{i:04d}.json"), "w") as fh:
                fh.write(rec.full_json() + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planted-bisection",
        description="Planted-bisection minimum-cut laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a planted graph to a file pair")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d-plus", dest="d_plus", type=float, required=True)
    p.add_argument("--d-minus", dest="d_minus", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("wp-run", help="run Warning Propagation, emit per-round estimates")
    p.add_argument("--graph", required=True)
    p.add_argument("--rounds", type=int, default=20)
    p.add_argument("--init", choices=["full-sigma", "core-sigma", "file"], default="full-sigma")
    p.add_argument("--init-file", default=None)
    p.add_argument("--d-plus", dest="d_plus", type=float, default=None)
    p.add_argument("--d-minus", dest="d_minus", type=float, default=None)
    p.add_argument("--c", type=float, default=4.0)
    p.add_argument("--outside-cap", dest="outside_cap", type=int, default=100)
    p.add_argument("--dump-core", dest="dump_core", default=None,
                   help="with core-sigma init: write the sorted core vertices here")
    _add_common(p)
    p.set_defaults(func=_cmd_wp_run)

    p = sub.add_parser("fixed-point", help="solve the distributional fixed point")
    p.add_argument("--d-plus", dest="d_plus", type=float, required=True)
    p.add_argument("--d-minus", dest="d_minus", type=float, required=True)
    p.add_argument("--eps", type=float, default=1e-12)
    p.add_argument("--tail-tol", dest="tail_tol", type=float, default=1e-10)
    p.add_argument("--c", type=float, default=4.0)
    _add_common(p)
    p.set_defaults(func=_cmd_fixed_point)

    p = sub.add_parser("gw-validate", help="tree root-message law vs exact iterates")
    p.add_argument("--d-plus", dest="d_plus", type=float, required=True)
    p.add_argument("--d-minus", dest="d_minus", type=float, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--trials", type=int, default=10_000)
    _add_common(p)
    p.set_defaults(func=_cmd_gw_validate)

    p = sub.add_parser("census", help="depth-t neighborhood class frequencies")
    p.add_argument("--graph", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--sample-size", dest="sample_size", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=_cmd_census)

    p = sub.add_parser("oracle-compare", help="exact bisection vs planted vs core cut")
    p.add_argument("--graph", required=True)
    p.add_argument("--d-plus", dest="d_plus", type=float, required=True)
    p.add_argument("--d-minus", dest="d_minus", type=float, required=True)
    p.add_argument("--c", type=float, default=4.0)
    p.add_argument("--outside-cap", dest="outside_cap", type=int, default=100)
    _add_common(p)
    p.set_defaults(func=_cmd_oracle_compare)

    p = sub.add_parser("end-to-end", help="full pipeline, JSON run record")
    p.add_argument("--config", default=None, help="flat key = value config file")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--d-plus", dest="d_plus", type=float, default=None)
    p.add_argument("--d-minus", dest="d_minus", type=float, default=None)
    p.add_argument("--wp-rounds", dest="wp_rounds", type=int, default=None)
    p.add_argument("--c", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_end_to_end)

    p = sub.add_parser("sweep", help="cartesian sweep, CSV summary")
    p.add_argument("--config", default=None)
    p.add_argument("--grid-n", dest="grid_n", default=None, help="comma list")
    p.add_argument("--grid-d-plus", dest="grid_d_plus", default=None)
    p.add_argument("--grid-d-minus", dest="grid_d_minus", default=None)
    p.add_argument("--grid-wp-rounds", dest="grid_wp_rounds", default=None)
    p.add_argument("--records-dir", dest="records_dir", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--d-plus", dest="d_plus", type=float, default=None)
    p.add_argument("--d-minus", dest="d_minus", type=float, default=None)
    p.add_argument("--wp-rounds", dest="wp_rounds", type=int, default=None)
    p.add_argument("--c", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_threads(args.threads)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return 3
    except AssertionError as exc:
        print(f"hard check failed: {exc}", file=sys.stderr)
        return 4
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
