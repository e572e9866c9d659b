# Codes By Visionnn

from typing import Dict, List, Optional, Tuple

from config import AUX_POOL_SIZE, CORES_PER_SERVER, PREFIX_LEN
from errors import UnknownServerError
from flow_id import prefix_of
from logger import log


class IngressMapper:
    """
    Rack-level steering of k-bit destination prefixes to servers.

    A prefix sticks to the server it was first steered to. New prefixes go
    to the busiest server still under tau dedicated cores, so lightly used
    servers keep headroom for auxiliary cores; when none qualifies the next
    unused server is recruited.
    """

    def __init__(self, num_servers: int, prefix_len: int = PREFIX_LEN, tau: Optional[int] = None):
        if num_servers < 1:
            raise ValueError("rack needs at least one server")
        if not 0 <= prefix_len <= 32:
            raise ValueError(f"prefix length must be in 0..32, got {prefix_len}")
        self.num_servers = num_servers
        self.prefix_len = prefix_len
        self.tau = tau if tau is not None else CORES_PER_SERVER - AUX_POOL_SIZE
        self._table: Dict[int, int] = {}
        self._reported: List[int] = [0] * num_servers
        self._used: List[bool] = [False] * num_servers
        self.recruitments: List[Tuple[int, int]] = []   # (time, server)
        self._saturation_logged = False

    def steer(self, dst_addr: int, now: int = 0) -> int:
        prefix = prefix_of(dst_addr, self.prefix_len)
        server = self._table.get(prefix)
        if server is not None:
            return server

        candidates = [s for s in range(self.num_servers) if self._used[s] and self._reported[s] < self.tau]
        if candidates:
            server = min(candidates, key=lambda s: (-self._reported[s], s))
        else:
            unused = [s for s in range(self.num_servers) if not self._used[s]]
            if unused:
                server = unused[0]
                self._used[server] = True
                self.recruitments.append((now, server))
                log.info(f"INGRESS | recruited server={server} at t={now}")
            else:
                server = min(range(self.num_servers), key=lambda s: (self._reported[s], s))
                if not self._saturation_logged:
                    log.warning(f"INGRESS | rack saturated: every server at >= tau={self.tau} dedicated cores")
                    self._saturation_logged = True

        self._table[prefix] = server
        return server

    def report_cores(self, server: int, count: int) -> None:
        """Latest dedicated-core count of a server; steering uses it until the next report."""
        if not 0 <= server < self.num_servers:
            raise UnknownServerError(f"unknown server id {server} (rack has {self.num_servers})")
        self._reported[server] = count

    def reported(self, server: int) -> int:
        return self._reported[server]

    def in_use(self, server: int) -> bool:
        return self._used[server]

    def table_size(self) -> int:
        return len(self._table)
