# Codes By Visionnn

from collections import Counter

from audit import check_latency_bound, run_audits
from metrics import Metrics


def _make(**overrides) -> Metrics:
    metrics = Metrics(latencies=[1000, 2000, 3000], arrivals=5, drops=Counter(nic_overflow=1), in_flight=1)
    for key, value in overrides.items():
        setattr(metrics, key, value)
    return metrics


class TestRunAudits:
    def test_clean_run_passes(self):
        assert run_audits(_make()) == (True, "")

    def test_conservation(self):
        ok, reason = run_audits(_make(arrivals=6))
        assert not ok
        assert "conservation" in reason

    def test_flow_order(self):
        ok, reason = run_audits(_make(order_violations=2))
        assert not ok
        assert "out of order" in reason

    def test_affinity(self):
        ok, reason = run_audits(_make(affinity_violations=1))
        assert not ok
        assert "overlapped" in reason

    def test_first_failure_wins(self):
        ok, reason = run_audits(_make(arrivals=6, order_violations=1))
        assert "conservation" in reason

    def test_latency_bound_only_when_asked(self):
        assert run_audits(_make(), latency_bound_ns=1000)[0] is False
        assert run_audits(_make())[0] is True


class TestLatencyBound:
    def test_counts_violations(self):
        ok, reason = check_latency_bound(_make(), 1500)
        assert not ok
        assert reason.startswith("2 completions")

    def test_empty_run(self):
        assert check_latency_bound(Metrics(), 1) == (True, "")
