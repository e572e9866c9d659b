# Codes By Visionnn

import pytest

from audit import run_audits
from chain_model import ChainSpec, SplitScheme
from errors import PredictorError, PredictorMismatchError, SimulationError, UnknownModeError
from metrics import nearest_rank
from predictor import Predictors, analytic_predictors, analytic_threshold_table, train_short_term
from settings import ChainSettings, ExperimentConfig, StageSettings
from simulator import (
    MODES,
    ModeProfile,
    SimParams,
    Simulator,
    SoftwareQueue,
    _Packet,
    mode_profile,
    probe_rate,
    profile_epochs,
    run_mode,
)
from traffic import PacketRecord, StormSpec, WorkloadSpec, generate


def _config(costs=(1000,), new_flow=3000, batch=4, aux=24, **sections) -> ExperimentConfig:
    config = ExperimentConfig()
    config.chain = ChainSettings([StageSettings(f"nf{i}", c) for i, c in enumerate(costs)], new_flow, batch)
    config.rack.aux_pool_size = aux
    for dotted, value in sections.items():
        section, key = dotted.split("__")
        setattr(getattr(config, section), key, value)
    return config


def _storm(flows=2000, window=0.004, seed=1):
    return generate(WorkloadSpec(storms=(StormSpec(0.0, window, flows),), duration=window, seed=seed))


def _p99(metrics) -> float:
    return nearest_rank(metrics.latencies, 99)


def _avg_cores(metrics) -> float:
    return sum(metrics.core_samples) / len(metrics.core_samples)


class TestModes:
    def test_mode_table(self):
        assert "full" in MODES
        assert mode_profile("hash_only").placement == "hash"
        assert not mode_profile("per_flow_per_core").needs_predictors
        assert mode_profile("no_core_mapper").needs_predictors

    def test_unknown_mode(self):
        with pytest.raises(UnknownModeError):
            mode_profile("turbo")

    def test_unknown_mode_from_run(self):
        with pytest.raises(UnknownModeError):
            run_mode(_config(), [], "turbo")


class TestSimParams:
    def test_aux_pool_must_leave_dedicated_cores(self):
        with pytest.raises(SimulationError):
            SimParams(cores_per_server=8, aux_pool=8)

    def test_from_config(self):
        params = SimParams.from_config(_config(aux=12, server_mapper__rss_update_delay_s=0.001))
        assert params.aux_pool == 12
        assert params.candidate_cores == 20
        assert params.rss_update_delay == 1_000_000

    def test_tau_follows_the_rack(self):
        config = _config(aux=24, rack__servers=2)
        params = SimParams.from_config(config)
        assert params.tau == 8
        assert SimParams(aux_pool=20).ingress_tau == 12

        chain = config.chain.to_chain()
        family, table = analytic_predictors(chain, 200_000, params.max_split)
        sim = Simulator(params, chain, 200_000, mode_profile("full"), family, table)
        assert sim.ingress.tau == 8

    def test_explicit_tau_wins(self):
        assert SimParams.from_config(_config(aux=24, ingress__tau=3)).tau == 3


class TestSoftwareQueue:
    def test_capacity_and_force(self):
        queue = SoftwareQueue(1, 1)
        assert queue.push(_Packet(0, 1, 0, 0))
        assert not queue.push(_Packet(0, 1, 1, 0))
        assert queue.push(_Packet(0, 1, 2, 0), force=True)
        assert len(queue) == 2

    def test_push_front_keeps_order(self):
        queue = SoftwareQueue(0, None)
        queue.push(_Packet(0, 1, 2, 0))
        queue.push_front([_Packet(0, 1, 0, 0), _Packet(0, 1, 1, 0)])
        assert [p.seq for p in queue.pop_batch(3)] == [0, 1, 2]

    def test_take_flows_keeps_the_rest_in_order(self):
        queue = SoftwareQueue(0, None)
        for seq, flow in enumerate((1, 2, 1, 3)):
            queue.push(_Packet(0, flow, seq, 0))
        taken = queue.take_flows({1})
        assert [p.seq for p in taken[1]] == [0, 2]
        assert queue.flow_backlog() == {2: 1, 3: 1}
        assert queue.take_flows({9}) == {}


class TestKernel:
    def test_empty_trace(self):
        metrics = run_mode(_config(), [], "hash_only")
        assert metrics.arrivals == 0
        assert metrics.end_time == 0
        assert metrics.latencies == []

    def test_single_packet_latency(self):
        config = _config(simulator__hash_cores=1)
        trace = [PacketRecord(0, 1, 0), PacketRecord(10_000, 1, 0)]
        metrics = run_mode(config, trace, "hash_only")
        # first packet pays the new-flow cost
        assert metrics.latencies == [4000, 1000]
        assert metrics.end_time == 11_000

    def test_propagation_delay_shifts_arrivals_only(self):
        config = _config(simulator__hash_cores=1, ingress__propagation_delay_ns=500)
        metrics = run_mode(config, [PacketRecord(0, 1, 0)], "hash_only")
        assert metrics.latencies == [4000]
        assert metrics.end_time == 4500

    def test_pipeline_split_service(self):
        chain = ChainSpec.from_costs([1000, 1000], 0, 32)
        done = []
        sim = Simulator(
            SimParams(),
            chain,
            2_000_000,
            ModeProfile("isolated", "isolated"),
            isolated_scheme=SplitScheme((1,)),
            on_complete=lambda at, flow, latency: done.append(at),
        )
        sim.run([PacketRecord(0, 1, 0)] * 3)
        # the first packet starts alone; the other two pipeline behind it
        assert done == [2000, 4000, 5000]

    def test_drain_timeout_leaves_packets_in_flight(self):
        config = _config(costs=(1_000_000,), simulator__hash_cores=1, simulator__drain_timeout_s=0.0)
        metrics = run_mode(config, [PacketRecord(0, 1, 0)] * 10, "hash_only")
        assert metrics.completions == 0
        assert metrics.in_flight == 10
        assert run_audits(metrics) == (True, "")

    def test_nic_overflow_is_counted(self):
        config = _config(simulator__hash_cores=1, rack__nic_queue_capacity=8)
        trace = [PacketRecord(0, flow, 0) for flow in range(50)]
        metrics = run_mode(config, trace, "hash_only")
        assert metrics.drops["nic_overflow"] > 0
        assert metrics.completions + metrics.dropped == 50
        assert run_audits(metrics)[0]

    def test_per_flow_cores_grow_with_flows(self):
        trace = [PacketRecord(0, flow, 0) for flow in range(5)] + [PacketRecord(150_000, 0, 0)]
        metrics = run_mode(_config(), trace, "per_flow_per_core")
        assert metrics.core_samples == [5]
        assert sorted(metrics.latencies) == [1000] + [4000] * 5

    def test_deterministic(self):
        config = _config()
        trace = generate(WorkloadSpec(flow_rate=20_000, mean_packets=4, duration=0.02, seed=4))
        first = run_mode(config, trace, "full", slo=200_000)
        second = run_mode(config, trace, "full", slo=200_000)
        assert first.summary() == second.summary()
        assert first.latencies == second.latencies


class TestPredictorChecks:
    def test_mismatched_chain_refused(self):
        other = analytic_predictors(ChainSpec.from_costs([2000], 3000, 4), 200_000, 2)
        with pytest.raises(PredictorMismatchError):
            run_mode(_config(), [PacketRecord(0, 1, 0)], "full", other, 200_000)

    def test_baselines_skip_predictors(self):
        # a 40 µs chain with 120 µs setup leaves no epoch budget under a 200 µs SLO
        config = _config(costs=(40_000,), new_flow=None)
        with pytest.raises(PredictorError):
            run_mode(config, [PacketRecord(0, 1, 0)], "full", slo=200_000)
        metrics = run_mode(config, [PacketRecord(0, 1, 0)], "per_flow_per_core", slo=200_000)
        assert metrics.completions == 1


class TestScenarios:
    def test_whale_on_one_core_blows_the_tail(self):
        config = _config(costs=(20_000,), new_flow=None, batch=32)
        trace = [PacketRecord(i * 10_000, 1, 0) for i in range(1000)]
        metrics = run_mode(config, trace, "per_flow_per_core", slo=200_000)
        assert metrics.completions == 1000
        assert _p99(metrics) >= 2_000_000

    def test_minnow_storm_hurts_hash_placement(self):
        config = _config(simulator__hash_cores=2)
        trace = generate(WorkloadSpec(
            persistent_flows=100,
            pacing_rate=1000,
            storms=(StormSpec(0.1, 0.01, 10_000),),
            duration=0.5,
            seed=2,
        ))
        metrics = run_mode(config, trace, "hash_only")
        p50 = nearest_rank(metrics.latencies, 50)
        assert p50 <= 10_000
        assert _p99(metrics) >= 20 * p50

    # a batch of 32 new-flow packets is 128 µs, so batch 32 runs under an
    # SLO whose epoch holds several batches
    @pytest.mark.parametrize("batch, slo", [(4, 200_000), (32, 1_000_000)])
    def test_two_epoch_bound_under_a_storm(self, batch, slo):
        metrics = run_mode(_config(batch=batch), _storm(), "full", slo=slo)
        assert metrics.completions == 2000
        assert max(metrics.latencies) <= slo
        assert metrics.migrations > 0
        assert run_audits(metrics, latency_bound_ns=slo) == (True, "")

    def test_trained_frontier_keeps_the_storm_within_the_slo(self):
        config = _config()
        chain = config.chain.to_chain()

        def profile(scheme, trace):
            return profile_epochs(chain, 200_000, scheme, trace)

        family = train_short_term(profile, chain, 200_000, [], 1, (1, 2, 4, 8, 16, 32), 32)
        predictors = Predictors(family, analytic_threshold_table(chain, 200_000))
        metrics = run_mode(config, _storm(), "full", predictors, 200_000)
        assert metrics.completions == 2000
        within = sum(1 for latency in metrics.latencies if latency <= 200_000)
        assert within >= 0.99 * metrics.completions
        assert run_audits(metrics)[0]

    def test_default_config_runs_in_full_mode(self):
        # 5 µs stage, batch 32, 200 µs SLO
        config = ExperimentConfig()
        trace = [PacketRecord(i * 10_000, 1, 1) for i in range(100)]
        metrics = run_mode(config, trace, "full", slo=200_000)
        assert config.chain.max_batch == 32
        assert metrics.completions == 100
        assert max(metrics.latencies) == 20_000
        assert run_audits(metrics, latency_bound_ns=200_000) == (True, "")

    @pytest.mark.parametrize("batch, slo", [(4, 200_000), (32, 1_000_000)])
    def test_core_mapper_ablations(self, batch, slo):
        trace = _storm()
        results = {mode: run_mode(_config(batch=batch), trace, mode, slo=slo)
                   for mode in ("full", "static_unsafe", "no_core_mapper", "static_safe")}
        assert _p99(results["full"]) < _p99(results["static_unsafe"]) < _p99(results["no_core_mapper"])
        assert _avg_cores(results["static_safe"]) >= _avg_cores(results["full"])
        for metrics in results.values():
            assert run_audits(metrics)[0]

    def test_boost_beats_slow_remapping(self):
        config = _config(costs=(1000,), new_flow=1000, batch=32)
        trace = []
        for i in range(int(0.1 * 0.97e6)):
            t = 200_000_000 + i * 1031
            trace.append(PacketRecord(t, 1, 0))
            trace.append(PacketRecord(t, 2, 0))
        results = {mode: run_mode(config, trace, mode, slo=1_000_000)
                   for mode in ("full", "no_boost", "on_demand_remap")}
        assert results["full"].boost_entries >= 1
        assert _p99(results["full"]) < _p99(results["no_boost"])
        assert _p99(results["full"]) < _p99(results["on_demand_remap"])
        for metrics in results.values():
            assert run_audits(metrics)[0]


class TestProbe:
    def test_underloaded_probe_passes(self):
        chain = ChainSpec.from_costs([10_000])
        p99 = probe_rate(chain, 1_000_000, 1, 5e4, 0.01, seed=1)
        assert p99 is not None and p99 <= 40_000

    def test_overloaded_probe_drops(self):
        chain = ChainSpec.from_costs([10_000])
        params = SimParams(nic_capacity=16, drain_timeout=0)
        assert probe_rate(chain, 1_000_000, 4, 4e5, 0.01, seed=1, params=params) is None
