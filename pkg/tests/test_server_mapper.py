# Codes By Visionnn

import random

import pytest

from errors import InfeasibleMappingError, OracleTooLargeError
from predictor import RateThresholdTable
from server_mapper import (
    BoostTransition,
    BucketStats,
    CoreMapping,
    MappingInstaller,
    ServerMapperConfig,
    boost_check,
    enumerate_exact,
    fits,
    milp_exact,
    remap_greedy,
)


def _table(rate: float = 100.0, grid=(1, 2, 4, 8)) -> RateThresholdTable:
    return RateThresholdTable("chain", 200_000, grid, tuple(rate for _ in grid))


def _all_fit(mapping: CoreMapping, stats: BucketStats, table: RateThresholdTable) -> bool:
    return all(
        fits(mapping.core_rate(stats, core), mapping.core_flows(stats, core), table)
        for core in mapping.active_cores()
    )


class TestBucketStats:
    def test_from_counts(self):
        stats = BucketStats.from_counts([100, 0], [10.0, 0.0], 5, 1_000_000_000)
        assert stats.rates == (100.0, 0.0)
        assert stats.flows == (2.0, 0.0)

    def test_rejects_mismatch_and_negatives(self):
        with pytest.raises(ValueError):
            BucketStats((1.0,), (1.0, 2.0))
        with pytest.raises(ValueError):
            BucketStats((-1.0,), (1.0,))


class TestCoreMapping:
    def test_spread(self):
        mapping = CoreMapping.spread(4, 3, 2)
        assert mapping.assignment == (0, 1, 0, 1)
        assert mapping.active_cores() == (0, 1)
        assert mapping.buckets_of(1) == [1, 3]

    def test_moved_buckets(self):
        a = CoreMapping((0, 0, 1), 2)
        b = CoreMapping((0, 1, 1), 2)
        assert a.moved_buckets(b) == frozenset({1})

    def test_rejects_out_of_range_core(self):
        with pytest.raises(ValueError):
            CoreMapping((0, 3), 2)


class TestRemapGreedy:
    def test_relieves_and_consolidates(self):
        stats = BucketStats((60, 60, 30, 30), (1, 1, 1, 1))
        result = remap_greedy(stats, CoreMapping((0, 0, 0, 0), 4), _table())
        assert result.feasible
        assert len(result.mapping.active_cores()) == 2
        assert _all_fit(result.mapping, stats, _table())
        assert result.migrated

    def test_already_fitting_mapping_is_kept(self):
        stats = BucketStats((10, 20), (1, 1))
        start = CoreMapping((0, 0), 4)
        result = remap_greedy(stats, start, _table())
        assert result.mapping == start
        assert result.migrated == frozenset()

    def test_consolidates_underloaded_cores(self):
        stats = BucketStats((10, 20, 30), (1, 1, 1))
        result = remap_greedy(stats, CoreMapping((0, 1, 2), 3), _table())
        assert len(result.mapping.active_cores()) == 1

    def test_flow_count_limits_packing(self):
        stats = BucketStats((10, 10), (5, 5))
        table = RateThresholdTable("chain", 1, (1, 8), (100.0, 100.0))
        result = remap_greedy(stats, CoreMapping((0, 0), 2), table)
        assert len(result.mapping.active_cores()) == 2

    def test_oversized_bucket_is_infeasible(self):
        stats = BucketStats((150, 10), (1, 1))
        result = remap_greedy(stats, CoreMapping((0, 0), 2), _table())
        assert not result.feasible

    def test_repacks_when_shedding_gets_stuck(self):
        table = RateThresholdTable("chain", 1, (1, 2, 4, 8), (100.0, 90.0, 75.0, 60.0))
        stats = BucketStats((52, 3, 22, 40, 44, 13, 37), (2, 1, 0.5, 1, 0.5, 2, 1))
        result = remap_greedy(stats, CoreMapping.spread(7, 3, 1), table)
        assert result.feasible
        assert len(result.mapping.active_cores()) == 3
        assert _all_fit(result.mapping, stats, table)

    def test_repack_keeps_buckets_on_their_cores_where_it_can(self):
        table = RateThresholdTable("chain", 1, (1, 2, 4, 8), (100.0, 90.0, 75.0, 60.0))
        stats = BucketStats((52, 3, 22, 40, 44, 13, 37), (2, 1, 0.5, 1, 0.5, 2, 1))
        result = remap_greedy(stats, CoreMapping.spread(7, 3, 1), table)
        # the core holding the most buckets stays on core 0
        assert 0 in result.mapping.active_cores()
        assert len(result.migrated) < 7

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            remap_greedy(BucketStats((1,), (1,)), CoreMapping((0, 0), 2), _table())


class TestExactOracle:
    def test_known_optimum(self):
        stats = BucketStats((60, 60, 30, 30), (1, 1, 1, 1))
        exact = milp_exact(stats, _table(), 4)
        assert exact.cores == 2
        assert _all_fit(exact.mapping, stats, _table())

    def test_matches_enumeration_on_random_instances(self):
        rng = random.Random(7)
        table = RateThresholdTable("chain", 1, (1, 2, 4), (100.0, 80.0, 60.0))
        for _ in range(10):
            buckets = rng.randint(2, 5)
            stats = BucketStats(
                tuple(rng.randint(5, 50) for _ in range(buckets)),
                tuple(rng.choice((0.5, 1.0)) for _ in range(buckets)),
            )
            expected = enumerate_exact(stats, table, buckets)
            if expected is None:
                with pytest.raises(InfeasibleMappingError):
                    milp_exact(stats, table, buckets)
            else:
                assert milp_exact(stats, table, buckets).cores == expected

    def test_greedy_close_to_optimum(self):
        stats = BucketStats((60, 60, 30, 30, 20, 20), (1, 1, 1, 1, 1, 1))
        exact = milp_exact(stats, _table(), 6)
        greedy = remap_greedy(stats, CoreMapping.spread(6, 6, 1), _table())
        assert greedy.feasible
        assert exact.cores <= len(greedy.mapping.active_cores()) <= exact.cores + 1

    def test_greedy_within_one_core_of_exact_on_random_instances(self):
        rng = random.Random(11)
        table = RateThresholdTable("chain", 1, (1, 2, 4, 8), (100.0, 90.0, 75.0, 60.0))
        feasible = 0
        for _ in range(500):
            buckets = rng.randint(1, 8)
            cores = rng.randint(1, 4)
            stats = BucketStats(
                tuple(rng.randint(1, 60) for _ in range(buckets)),
                tuple(rng.choice((0.5, 1.0, 2.0)) for _ in range(buckets)),
            )
            result = remap_greedy(stats, CoreMapping.spread(buckets, cores, 1), table)
            try:
                exact = milp_exact(stats, table, cores)
            except InfeasibleMappingError:
                assert not result.feasible
                continue
            feasible += 1
            assert result.feasible
            assert _all_fit(result.mapping, stats, table)
            assert len(result.mapping.active_cores()) <= exact.cores + 1
        assert feasible > 100

    def test_too_large(self):
        stats = BucketStats(tuple([1.0] * 13), tuple([1.0] * 13))
        with pytest.raises(OracleTooLargeError):
            milp_exact(stats, _table(), 4)

    def test_infeasible(self):
        with pytest.raises(InfeasibleMappingError):
            milp_exact(BucketStats((150,), (1,)), _table(), 2)


class TestMappingInstaller:
    def test_delayed_and_queued(self):
        installer = MappingInstaller(2000)
        first = CoreMapping((0,), 2)
        second = CoreMapping((1,), 2)
        assert installer.install_mapping(first, 0) == 2000
        assert installer.install_mapping(second, 500) == 4000
        assert installer.latest() == second
        assert installer.pop_due(1999) == []
        assert installer.pop_due(2000) == [first]
        assert installer.pending()
        assert installer.pop_due(5000) == [second]
        assert installer.latest() is None


class TestBoost:
    def test_transitions(self):
        assert boost_check(257, False, 256) is BoostTransition.ENTER
        assert boost_check(256, False, 256) is BoostTransition.STAY
        assert boost_check(10, True, 256) is BoostTransition.STAY
        assert boost_check(0, True, 256) is BoostTransition.EXIT

    def test_config_validation(self):
        ServerMapperConfig()
        with pytest.raises(ValueError):
            ServerMapperConfig(safety_margin=1.0)
        with pytest.raises(ValueError):
            ServerMapperConfig(decision_interval=0)
        with pytest.raises(ValueError):
            ServerMapperConfig(dispatch_cost=-1)
