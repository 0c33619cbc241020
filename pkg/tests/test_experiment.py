import json

import pytest

from planted_bisection import ConfigError, ExperimentConfig, run_end_to_end, sweep, sweep_csv
from planted_bisection.experiment import config_text, parse_config_text


class TestConfig:
    def test_round_trip_through_text(self):
        cfg = ExperimentConfig(n=500, d_plus=9.0, d_minus=2.0, seed=4, wp_rounds=6)
        assert parse_config_text(config_text(cfg)) == cfg

    def test_comments_and_blanks(self):
        cfg = parse_config_text("# comment\n\nn = 400\nd_plus = 7.5  # inline\n")
        assert cfg.n == 400 and cfg.d_plus == 7.5

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config_text("frobnicate = 3\n")

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError, match="bad value"):
            parse_config_text("n = banana\n")

    def test_validation_catches_model_errors(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(n=10, d_plus=50.0, d_minus=1.0).validate()
        with pytest.raises(ConfigError):
            ExperimentConfig(n=100, d_plus=0.5, d_minus=0.1).validate()


class TestRunEndToEnd:
    def test_record_is_reproducible(self):
        cfg = ExperimentConfig(n=800, d_plus=10.0, d_minus=1.0, seed=11, wp_rounds=5)
        a = run_end_to_end(cfg)
        b = run_end_to_end(cfg)
        assert a.canonical_json() == b.canonical_json()
        # timing is the only field outside the canonical form
        full = json.loads(a.full_json())
        canon = json.loads(a.canonical_json())
        assert set(full) - set(canon) == {"wall_clock_s"}

    def test_trace_has_one_row_per_round(self):
        cfg = ExperimentConfig(n=400, d_plus=8.0, d_minus=1.0, seed=3, wp_rounds=7)
        rec = run_end_to_end(cfg)
        assert [row[0] for row in rec.trace] == list(range(8))
        assert rec.y_final == rec.trace[-1][1]
        assert rec.normalized_estimate == pytest.approx(rec.y_final / cfg.n)

    def test_disconnected_classes_give_near_zero(self):
        # d_minus = 0: no cross edges, the minimum bisection is empty
        cfg = ExperimentConfig(n=600, d_plus=6.0, d_minus=0.0, seed=2, wp_rounds=5)
        rec = run_end_to_end(cfg)
        assert rec.normalized_estimate == pytest.approx(0.0, abs=1e-9)
        assert rec.phi_star == pytest.approx(0.0, abs=1e-9)
        assert rec.planted_width == 0

    def test_gap_condition_fields(self):
        cfg = ExperimentConfig(n=400, d_plus=50.0, d_minus=1.0, seed=1, wp_rounds=2)
        rec = run_end_to_end(cfg)
        assert rec.gap_lhs == 49.0
        assert rec.gap_rhs == pytest.approx(4 * (50 * 3.912023005428146) ** 0.5, rel=1e-9)
        assert rec.gap_condition_holds is False

    def test_census_block_optional(self):
        cfg = ExperimentConfig(
            n=400, d_plus=5.0, d_minus=1.0, seed=9, wp_rounds=2, census_depth=1, census_trials=5000
        )
        rec = run_end_to_end(cfg)
        assert rec.census_tv is not None and rec.census_cyclic_mass is not None


class TestSweep:
    def test_empty_grid(self):
        assert sweep(ExperimentConfig(n=300, d_plus=5.0, d_minus=1.0), {}) == []

    def test_single_cell_matches_direct_run(self):
        base = ExperimentConfig(n=300, d_plus=6.0, d_minus=1.0, seed=21, wp_rounds=3)
        records = sweep(base, {"wp_rounds": [3]})
        assert len(records) == 1
        cell_cfg = ExperimentConfig(**records[0].config)
        assert run_end_to_end(cell_cfg).canonical_json() == records[0].canonical_json()

    def test_rejects_unknown_axis(self):
        with pytest.raises(ConfigError, match="axes"):
            sweep(ExperimentConfig(), {"seed": [1, 2]})

    def test_csv_has_header_and_rows(self):
        base = ExperimentConfig(n=300, d_plus=6.0, d_minus=1.0, seed=21, wp_rounds=3)
        records = sweep(base, {"wp_rounds": [2, 3]})
        lines = sweep_csv(records).splitlines()
        assert lines[0].startswith("n,d_plus,d_minus,wp_rounds,seed")
        assert len(lines) == 3

    def test_estimate_trace_stabilizes_in_rounds(self):
        # within one run, the per-round estimate settles well before t=10
        base = ExperimentConfig(n=2000, d_plus=12.0, d_minus=1.0, seed=5, wp_rounds=20)
        (rec,) = sweep(base, {"wp_rounds": [20]})
        y10, y20 = rec.trace[10][1], rec.trace[20][1]
        assert abs(y20 - y10) / 2000 <= 1e-3
