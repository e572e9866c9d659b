# Codes By Visionnn

import ipaddress

_MASK64 = (1 << 64) - 1


def mix64(value: int) -> int:
    """
    splitmix64 finalizer. A bijection on 64-bit integers with good avalanche,
    used both to mint opaque flow ids and as the RSS hash.
    """
    z = (value + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def flow_id_from_tuple(src: int, dst: int, sport: int, dport: int, proto: int) -> int:
    """Derive a stable 64-bit flow id from a 5-tuple."""
    head = mix64(((src & 0xFFFFFFFF) << 32) | (dst & 0xFFFFFFFF))
    tail = ((sport & 0xFFFF) << 24) | ((dport & 0xFFFF) << 8) | (proto & 0xFF)
    return mix64(head ^ tail)


def generated_flow_id(seed: int, index: int) -> int:
    """Flow id for the index-th flow a seeded generator creates."""
    return mix64(((seed & 0xFFFFFFFF) << 32) | (index & 0xFFFFFFFF))


def rss_bucket(flow: int, buckets: int) -> int:
    """RSS bucket of a flow: 64-bit mix of the FlowId modulo the bucket count."""
    return mix64(flow) % buckets


def ip_to_int(text: str) -> int:
    """Dotted quad or decimal string to a 32-bit integer."""
    text = text.strip()
    if "." in text:
        return int(ipaddress.IPv4Address(text))
    value = int(text)
    if not 0 <= value <= 0xFFFFFFFF:
        raise ValueError(f"address out of range: {value}")
    return value


def prefix_of(addr: int, prefix_len: int) -> int:
    """The k-bit destination prefix of a 32-bit address."""
    if prefix_len <= 0:
        return 0
    return (addr & 0xFFFFFFFF) >> (32 - prefix_len)
