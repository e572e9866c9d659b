# Codes By Visionnn

from collections import Counter, defaultdict

import pytest

from errors import ConfigError, TraceFormatError
from traffic import (
    TRACE_HEADER,
    PacketRecord,
    StormSpec,
    WhaleSpec,
    WorkloadSpec,
    compute_stats,
    generate,
    paced_flows,
    parse_trace,
    write_trace,
)


def _write(tmp_path, text: str):
    path = tmp_path / "trace.csv"
    path.write_text(text, encoding="utf-8")
    return path


def _by_flow(trace):
    flows = defaultdict(list)
    for record in trace:
        flows[record.flow].append(record.arrival_time)
    return flows


class TestParseTrace:
    def test_header_and_dotted_addresses(self, tmp_path):
        path = _write(tmp_path, f"{TRACE_HEADER}\n0,7,10.0.0.1,64\n\n50,8,167772162,128\n")
        trace = parse_trace(path)
        assert trace == [
            PacketRecord(0, 7, 167772161, 64),
            PacketRecord(50, 8, 167772162, 128),
        ]

    def test_header_is_optional(self, tmp_path):
        path = _write(tmp_path, "5,1,1,64\n")
        assert parse_trace(path) == [PacketRecord(5, 1, 1, 64)]

    def test_header_after_blank_lines(self, tmp_path):
        path = _write(tmp_path, "\n  \n" + TRACE_HEADER + "\n5,1,1,64\n")
        assert parse_trace(path) == [PacketRecord(5, 1, 1, 64)]

    def test_header_only_on_the_first_line_with_content(self, tmp_path):
        with pytest.raises(TraceFormatError):
            parse_trace(_write(tmp_path, "5,1,1,64\n" + TRACE_HEADER + "\n"))

    def test_equal_timestamps_allowed(self, tmp_path):
        path = _write(tmp_path, "5,1,1,64\n5,2,1,64\n")
        assert len(parse_trace(path)) == 2

    def test_out_of_order_names_the_line(self, tmp_path):
        path = _write(tmp_path, f"{TRACE_HEADER}\n100,1,1,64\n50,1,1,64\n")
        with pytest.raises(TraceFormatError) as exc:
            parse_trace(path)
        assert exc.value.line == 3
        assert "line 3" in str(exc.value)

    @pytest.mark.parametrize("line", ["1,2,3", "1,2,3,4,5", "x,2,3,4", "1,2,300.1.1.1,4", "-1,2,3,4"])
    def test_malformed_lines(self, tmp_path, line):
        with pytest.raises(TraceFormatError):
            parse_trace(_write(tmp_path, "0,1,1,64\n" + line + "\n"))

    def test_empty_and_header_only(self, tmp_path):
        with pytest.raises(TraceFormatError):
            parse_trace(_write(tmp_path, ""))
        with pytest.raises(TraceFormatError):
            parse_trace(_write(tmp_path, TRACE_HEADER + "\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(TraceFormatError):
            parse_trace(tmp_path / "nope.csv")

    def test_written_trace_reads_back(self, tmp_path):
        records = [PacketRecord(0, 1, 2, 64), PacketRecord(10, 3, 4, 1500)]
        path = write_trace(records, tmp_path / "out" / "t.csv")
        assert parse_trace(path) == records


class TestWorkloadSpec:
    def test_defaults_are_valid(self):
        WorkloadSpec()

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"duration": 0},
            {"flow_rate": -1.0},
            {"pacing_rate": 0.0},
            {"mean_packets": 0.5},
            {"packets_per_flow": "zipf"},
            {"whales": (WhaleSpec(0.0, 0.0, 10.0),)},
            {"storms": (StormSpec(0.0, 0.01, 0),)},
            {"address_base": 0xFFFFFF00, "address_pool": 16, "address_stride": 256},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ConfigError):
            WorkloadSpec(**kwargs)


class TestGenerate:
    def test_same_seed_same_trace(self):
        spec = WorkloadSpec(flow_rate=2000, mean_packets=4, packets_per_flow="geometric", duration=0.05, seed=3)
        assert generate(spec) == generate(spec)

    def test_seed_changes_trace(self):
        a = generate(WorkloadSpec(flow_rate=2000, duration=0.05, seed=1))
        b = generate(WorkloadSpec(flow_rate=2000, duration=0.05, seed=2))
        assert a != b

    def test_sorted_by_time(self):
        trace = generate(WorkloadSpec(flow_rate=5000, persistent_flows=5, shape_flows=False, duration=0.02))
        times = [r.arrival_time for r in trace]
        assert times == sorted(times)

    def test_whale_is_one_paced_flow(self):
        trace = generate(WorkloadSpec(whales=(WhaleSpec(0.0, 0.01, 1e5),), duration=0.001))
        flows = _by_flow(trace)
        assert len(flows) == 1
        times = next(iter(flows.values()))
        assert len(times) == 1000
        assert {b - a for a, b in zip(times, times[1:])} == {10_000}

    def test_storm_flows(self):
        trace = generate(WorkloadSpec(storms=(StormSpec(0.001, 0.01, 100),)))
        counts = Counter(r.flow for r in trace)
        assert len(counts) == 100
        assert set(counts.values()) == {1}
        assert all(1_000_000 <= r.arrival_time <= 11_000_000 for r in trace)

    def test_persistent_flows_cut_at_duration(self):
        trace = generate(WorkloadSpec(persistent_flows=10, pacing_rate=1000, duration=0.01))
        assert len(_by_flow(trace)) == 10
        assert all(r.arrival_time <= 10_000_000 for r in trace)

    def test_flows_share_an_address(self):
        trace = generate(WorkloadSpec(flow_rate=1000, mean_packets=5, duration=0.05))
        addrs = defaultdict(set)
        for r in trace:
            addrs[r.flow].add(r.dst_addr)
        assert all(len(a) == 1 for a in addrs.values())

    def test_no_traffic(self):
        assert generate(WorkloadSpec()) == []


class TestPacedFlows:
    def test_each_flow_keeps_its_gap(self):
        trace = paced_flows(4, 4000, 0.01, seed=5)
        flows = _by_flow(trace)
        assert len(flows) == 4
        for times in flows.values():
            assert len(times) in (10, 11)
            assert {b - a for a, b in zip(times, times[1:])} == {1_000_000}


class TestComputeStats:
    def test_whale_stats(self):
        trace = [PacketRecord(i * 10_000, 9, 0) for i in range(1000)]
        stats = compute_stats(trace)
        assert stats.flow_count == 1
        assert stats.packet_count == 1000
        assert stats.duration_ns == 9_990_000
        assert stats.max_flow_rate == pytest.approx(1e5)

    def test_flow_arrival_rate(self):
        trace = [PacketRecord(i * 1_000_000, i, 0) for i in range(11)]
        stats = compute_stats(trace)
        assert stats.flow_count == 11
        assert stats.flow_arrival_rate == pytest.approx(11 / 0.01)

    def test_empty(self):
        stats = compute_stats([])
        assert stats.packet_count == 0
        assert stats.max_flow_rate == 0.0
