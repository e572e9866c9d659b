# Codes By Visionnn

import pytest

from chain_model import ChainSpec
from fingerprint import canonical_json, chain_hash, config_hash
from flow_id import flow_id_from_tuple, generated_flow_id, ip_to_int, mix64, prefix_of, rss_bucket


class TestFlowIds:
    def test_mix_is_injective_on_a_sample(self):
        assert len({mix64(i) for i in range(10_000)}) == 10_000

    def test_tuple_ids_are_stable_and_distinct(self):
        a = flow_id_from_tuple(ip_to_int("10.0.0.1"), ip_to_int("10.0.0.2"), 1234, 80, 6)
        b = flow_id_from_tuple(ip_to_int("10.0.0.1"), ip_to_int("10.0.0.2"), 1234, 80, 17)
        assert a == flow_id_from_tuple(ip_to_int("10.0.0.1"), ip_to_int("10.0.0.2"), 1234, 80, 6)
        assert a != b
        assert 0 <= a < 1 << 64

    def test_generated_ids_depend_on_seed(self):
        assert generated_flow_id(1, 0) != generated_flow_id(2, 0)
        assert generated_flow_id(1, 5) == generated_flow_id(1, 5)

    def test_rss_bucket_range(self):
        buckets = {rss_bucket(generated_flow_id(1, i), 512) for i in range(5000)}
        assert buckets <= set(range(512))
        # spread over (nearly) every bucket
        assert len(buckets) > 500


class TestAddresses:
    def test_ip_to_int(self):
        assert ip_to_int("10.0.0.1") == 0x0A000001
        assert ip_to_int(" 167772161 ") == 0x0A000001

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            ip_to_int(str(1 << 32))
        with pytest.raises(ValueError):
            ip_to_int("10.0.0.300")

    def test_prefix_of(self):
        assert prefix_of(ip_to_int("10.1.2.3"), 16) == 0x0A01
        assert prefix_of(ip_to_int("10.1.2.3"), 32) == ip_to_int("10.1.2.3")
        assert prefix_of(ip_to_int("10.1.2.3"), 0) == 0


class TestFingerprint:
    def test_key_order_does_not_matter(self):
        assert canonical_json({"b": 1, "a": 2}) == canonical_json({"a": 2, "b": 1})
        assert config_hash({"b": 1, "a": 2}) == config_hash({"a": 2, "b": 1})

    def test_chain_hash_tracks_costs(self):
        assert chain_hash(ChainSpec.from_costs([1000])) == chain_hash(ChainSpec.from_costs([1000]))
        assert chain_hash(ChainSpec.from_costs([1000])) != chain_hash(ChainSpec.from_costs([1001]))
        assert len(chain_hash(ChainSpec.from_costs([1000]))) == 64
