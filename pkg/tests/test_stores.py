# Codes By Visionnn

import pytest

from chain_model import ChainSpec
from errors import PredictorError, PredictorMismatchError
from fingerprint import chain_hash
from predictor import analytic_frontier_family, analytic_threshold_table
from predictor_store import (
    frontier_path,
    load_frontier,
    load_thresholds,
    save_frontier,
    save_thresholds,
    threshold_path,
)
from report_store import append_records, read_records, unique_report_path


@pytest.fixture(autouse=True)
def isolated_dirs(tmp_path, monkeypatch):
    """Redirect PREDICTOR_DIR and RESULTS_DIR to temp directories for each test."""
    monkeypatch.setattr("predictor_store.PREDICTOR_DIR", tmp_path / "predictors")
    monkeypatch.setattr("report_store.RESULTS_DIR", tmp_path / "results")
    yield tmp_path


def _chain() -> ChainSpec:
    return ChainSpec.from_costs([500, 500], 3000, 4)


class TestFrontierFiles:
    def test_save_and_load(self):
        family = analytic_frontier_family(_chain(), 400_000, 2)
        path = save_frontier(family)
        assert path == frontier_path(400_000)
        assert path.name == "frontier-slo400.txt"
        assert path.read_text().startswith("#burstscale-frontier v1\n")

        loaded = load_frontier(400_000, expected_chain=chain_hash(_chain()))
        assert loaded.epoch_length == family.epoch_length
        assert [fr.scheme for fr in loaded.frontiers] == [fr.scheme for fr in family.frontiers]
        assert [fr.points for fr in loaded.frontiers] == [fr.points for fr in family.frontiers]

    def test_other_chain_refused(self):
        save_frontier(analytic_frontier_family(_chain(), 400_000, 1))
        other = chain_hash(ChainSpec.from_costs([900], 3000, 4))
        with pytest.raises(PredictorMismatchError, match="retrain"):
            load_frontier(400_000, expected_chain=other)

    def test_bad_magic(self):
        path = frontier_path(200_000)
        path.parent.mkdir(parents=True)
        path.write_text("#something-else v9\nchain=x\n")
        with pytest.raises(PredictorError, match="expected header"):
            load_frontier(200_000)

    def test_row_before_section(self):
        path = frontier_path(200_000)
        path.parent.mkdir(parents=True)
        path.write_text("#burstscale-frontier v1\nchain=x\nepoch_ns=100000\nslo_ns=200000\n1,10\n")
        with pytest.raises(PredictorError, match="row before any section"):
            load_frontier(200_000)

    def test_missing_file(self):
        with pytest.raises(PredictorError):
            load_frontier(123_000)

    def test_fractional_slo_name(self, tmp_path):
        assert frontier_path(250_500, tmp_path).name == "frontier-slo250.5.txt"


class TestThresholdFiles:
    def test_save_and_load(self):
        table = analytic_threshold_table(_chain(), 1_000_000, (1, 2, 4))
        path = save_thresholds(table)
        assert path == threshold_path(1_000_000)
        loaded = load_thresholds(1_000_000, expected_chain=chain_hash(_chain()))
        assert loaded.grid == (1, 2, 4)
        assert loaded.rates == pytest.approx(table.rates, abs=1e-3)

    def test_malformed_row(self):
        path = threshold_path(1_000_000)
        path.parent.mkdir(parents=True)
        path.write_text("#burstscale-thresholds v1\nchain=x\nslo_ns=1000000\nf,T\n1;300\n")
        with pytest.raises(PredictorError, match="malformed row"):
            load_thresholds(1_000_000)


class TestReports:
    def test_collision_suffix(self):
        first = unique_report_path("sweep")
        first.touch()
        second = unique_report_path("sweep")
        second.touch()
        third = unique_report_path("sweep")
        assert [p.name for p in (first, second, third)] == ["sweep.jsonl", "sweep_1.jsonl", "sweep_2.jsonl"]

    def test_append_and_read(self):
        path = unique_report_path()
        assert append_records(path, [{"type": "summary", "p99_us": 12.5}]) == 1
        assert append_records(path, iter([{"type": "alert", "flow": 3}, {"type": "alert", "flow": 4}])) == 2
        records = read_records(path)
        assert [r["type"] for r in records] == ["summary", "alert", "alert"]
        assert records[0]["p99_us"] == 12.5
