# Codes By Visionnn

"""
burstscale Run Audits
Post-run checks over a finished simulation.

Checks performed:
  1. Packet conservation (arrivals = completions + drops + in-flight)
  2. Per-flow completion order
  3. Flow-to-core affinity (no flow on two cores at once)
  4. Optional latency bound
"""

from functools import partial
from typing import Optional, Tuple

from logger import log
from metrics import Metrics

AuditResult = Tuple[bool, str]  # (ok, reason)


def check_conservation(metrics: Metrics) -> AuditResult:
    accounted = metrics.completions + metrics.dropped + metrics.in_flight
    if accounted != metrics.arrivals:
        return (
            False,
            f"packet conservation broken: {metrics.arrivals} arrivals vs "
            f"{metrics.completions} completed + {metrics.dropped} dropped + {metrics.in_flight} in flight",
        )
    return True, ""


def check_flow_order(metrics: Metrics) -> AuditResult:
    if metrics.order_violations:
        return False, f"{metrics.order_violations} packets completed out of order within their flow"
    return True, ""


def check_affinity(metrics: Metrics) -> AuditResult:
    if metrics.affinity_violations:
        return False, f"{metrics.affinity_violations} services overlapped a flow's service on another core"
    return True, ""


def check_latency_bound(metrics: Metrics, bound_ns: int) -> AuditResult:
    worst = max(metrics.latencies, default=0)
    if worst > bound_ns:
        over = sum(1 for lat in metrics.latencies if lat > bound_ns)
        return False, f"{over} completions exceeded {bound_ns} ns (worst {worst} ns)"
    return True, ""


def run_audits(metrics: Metrics, latency_bound_ns: Optional[int] = None) -> AuditResult:
    """
    Run every check in order.

    Returns:
        (True, "") if all pass, else (False, reason) for the first failure.
    """
    checks = [
        ("Conservation", check_conservation),
        ("Flow order",   check_flow_order),
        ("Affinity",     check_affinity),
    ]
    if latency_bound_ns is not None:
        checks.append(("Latency bound", partial(check_latency_bound, bound_ns=latency_bound_ns)))

    for check_name, check_fn in checks:
        ok, reason = check_fn(metrics)
        if not ok:
            log.warning(f"AUDIT | {check_name} FAILED: {reason}")
            return False, reason
        log.debug(f"AUDIT |   ✓ {check_name} passed")
    return True, ""
