"""End-to-end experiment orchestration and machine-readable run records.

A run samples a planted graph, extracts the core, runs Warning Propagation
from the full planted labeling while recording the cut estimate each round,
solves the distributional fixed point, and reports the normalized gap between
the two.  All stochastic fields of a RunRecord are reproducible bit-for-bit
from the config; wall-clock timing is the one field excluded from the
canonical JSON used for reproducibility checks.
"""

from __future__ import annotations

import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, fields, replace
from itertools import product

import numpy as np
import scipy

from . import __version__
from .core import CoreParams, extract_core
from .errors import ConfigError
from .fixed_point import find_fixed_point, gap_condition, phi_exact
from .graphs import FrozenAssignment, ModelParams, sample_planted_graph
from .gw import census_tv, neighborhood_census, tree_census
from .rng import derive_seed_sequence
from .wp import bisection_estimate, init_messages, wp_step

__all__ = ["ExperimentConfig", "RunRecord", "run_end_to_end", "sweep", "sweep_csv"]


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 100_000
    d_plus: float = 200.0
    d_minus: float = 1.0
    seed: int = 0
    c: float = 4.0
    outside_cap: int = 100
    wp_rounds: int = 20
    fp_eps: float = 1e-12
    tail_tol: float = 1e-10
    census_depth: int = 0
    census_trials: int = 0
    census_sample_size: int = 0
    census_min_prob: float = 1e-3

    def validate(self) -> "ExperimentConfig":
        try:
            ModelParams(self.n, self.d_plus, self.d_minus, self.seed)
            CoreParams(self.c, self.outside_cap)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.d_plus <= 1:
            raise ConfigError("end-to-end runs need d_plus > 1 (core deviation bound)")
        if self.wp_rounds < 0:
            raise ConfigError("wp_rounds must be nonnegative")
        if self.fp_eps <= 0:
            raise ConfigError("fp_eps must be positive")
        return self


_CONFIG_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def parse_config_text(text: str) -> ExperimentConfig:
    """Flat `key = value` lines; '#' starts a comment; unknown keys rejected."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _CONFIG_TYPES:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        caster = int if _CONFIG_TYPES[key] in ("int", int) else float
        try:
            values[key] = caster(val)
        except ValueError as exc:
            raise ConfigError(f"config line {lineno}: bad value for {key!r}: {val!r}") from exc
    return ExperimentConfig(**values)


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def config_text(config: ExperimentConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in asdict(config).items())


def _versions() -> dict[str, str]:
    return {
        "planted_bisection": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": ".".join(map(str, sys.version_info[:3])),
    }


@dataclass
class RunRecord:
    config: dict
    m_edges: int
    planted_width: int
    core_size: int
    core_fraction: float
    gap_lhs: float
    gap_rhs: float
    gap_condition_holds: bool
    trace: list  # rows [t, estimate, normalized_estimate]
    y_final: float
    normalized_estimate: float
    p_star: list
    fp_iterations: int
    fp_converged: bool
    fp_skewed: bool
    phi_star: float
    abs_discrepancy: float
    rel_discrepancy: float
    census_tv: float | None
    census_cyclic_mass: float | None
    versions: dict
    wall_clock_s: float

    def to_dict(self) -> dict:
        return asdict(self)

    def canonical_json(self) -> str:
        """Deterministic serialization: every field here is a pure function of
        the config.  Timing is excluded."""
        data = self.to_dict()
        data.pop("wall_clock_s")
        return json.dumps(data, sort_keys=True, indent=2)

    def full_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def run_end_to_end(config: ExperimentConfig) -> RunRecord:
    config.validate()
    start = time.perf_counter()
    params = ModelParams(config.n, config.d_plus, config.d_minus, config.seed)
    g, a = sample_planted_graph(params)
    cp = CoreParams(config.c, config.outside_cap)
    core = extract_core(g, a, params, cp)

    state = init_messages(g, FrozenAssignment.from_assignment(a))
    trace = [[0, bisection_estimate(g, state), bisection_estimate(g, state) / config.n]]
    for _ in range(config.wp_rounds):
        state = wp_step(g, state)
        est = bisection_estimate(g, state)
        trace.append([state.t, est, est / config.n])
    y_final = trace[-1][1]

    fp = find_fixed_point(config.d_plus, config.d_minus, config.fp_eps, tail_tol=config.tail_tol)
    phi_star = phi_exact(fp.p_star, config.d_plus, config.d_minus, config.tail_tol)
    normalized = y_final / config.n
    abs_disc = abs(normalized - phi_star)
    gap_lhs, gap_rhs, gap_holds = gap_condition(config.d_plus, config.d_minus, config.c)

    tv = cyclic_mass = None
    if config.census_depth > 0 and config.census_trials > 0:
        from .gw import CYCLIC_BUCKET

        graph_census = neighborhood_census(
            g, a, config.census_depth, config.census_sample_size or None, config.seed
        )
        theory = tree_census(
            config.d_plus, config.d_minus, config.census_depth, config.census_trials, config.seed
        )
        tv = census_tv(graph_census, theory, config.census_min_prob)
        cyclic_mass = graph_census.get(CYCLIC_BUCKET, 0.0)

    return RunRecord(
        config=asdict(config),
        m_edges=g.num_edges,
        planted_width=int(np.sum(a.sigma[g.edge_u] != a.sigma[g.edge_v])) if g.num_edges else 0,
        core_size=core.size,
        core_fraction=core.size / config.n,
        gap_lhs=gap_lhs,
        gap_rhs=gap_rhs,
        gap_condition_holds=gap_holds,
        trace=trace,
        y_final=y_final,
        normalized_estimate=normalized,
        p_star=list(fp.p_star.as_tuple()),
        fp_iterations=fp.iterations,
        fp_converged=fp.converged,
        fp_skewed=fp.skewed,
        phi_star=phi_star,
        abs_discrepancy=abs_disc,
        rel_discrepancy=abs_disc / phi_star if phi_star > 0 else float("inf"),
        census_tv=tv,
        census_cyclic_mass=cyclic_mass,
        versions=_versions(),
        wall_clock_s=time.perf_counter() - start,
    )


def _derived_cell_seed(master_seed: int, index: int) -> int:
    return int(derive_seed_sequence(master_seed, "sweep", index).generate_state(1, np.uint32)[0])


def sweep(base: ExperimentConfig, grid: dict[str, list]) -> list[RunRecord]:
    """Cartesian sweep over grid axes (subset of n, d_plus, d_minus, wp_rounds),
    one run per cell with a seed derived from (base.seed, cell index)."""
    allowed = {"n", "d_plus", "d_minus", "wp_rounds"}
    bad = set(grid) - allowed
    if bad:
        raise ConfigError(f"sweep axes must be among {sorted(allowed)}, got {sorted(bad)}")
    axes = sorted(grid)
    records = []
    cells = list(product(*(grid[k] for k in axes))) if axes else []
    for idx, cell in enumerate(cells):
        overrides = dict(zip(axes, cell))
        cfg = replace(base, **overrides, seed=_derived_cell_seed(base.seed, idx))
        records.append(run_end_to_end(cfg))
    return records


_SWEEP_COLUMNS = [
    "n",
    "d_plus",
    "d_minus",
    "wp_rounds",
    "seed",
    "m_edges",
    "core_size",
    "core_fraction",
    "gap_lhs",
    "gap_rhs",
    "gap_condition_holds",
    "y_final",
    "normalized_estimate",
    "phi_star",
    "abs_discrepancy",
    "rel_discrepancy",
    "fp_converged",
    "fp_skewed",
    "census_tv",
    "wall_clock_s",
]


def sweep_csv(records: list[RunRecord]) -> str:
    """Summary table; one row per record, columns as in _SWEEP_COLUMNS."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_SWEEP_COLUMNS)
    for rec in records:
        row = []
        for col in _SWEEP_COLUMNS:
            if col in ("n", "d_plus", "d_minus", "wp_rounds", "seed"):
                row.append(rec.config[col])
            else:
                row.append(getattr(rec, col))
        writer.writerow(row)
    return buf.getvalue()
