# Codes By Visionnn

import pytest

from chain_model import (
    UNSPLIT,
    ChainSpec,
    SplitScheme,
    best_split,
    enumerate_splits,
    service_time,
    split_latency,
    split_throughput,
    sub_chain_costs,
    sub_chain_new_flow_costs,
    validate_scheme,
)
from errors import ConfigError, SplitSchemeError


def _chain(*costs, new_flow=None, batch=32) -> ChainSpec:
    return ChainSpec.from_costs(costs, new_flow, batch)


class TestChainSpec:
    def test_new_flow_cost_defaults_to_three_times_chain(self):
        chain = _chain(1000, 2000)
        assert chain.total_cost == 3000
        assert chain.per_new_flow_cost == 9000

    def test_explicit_zero_new_flow_cost(self):
        assert _chain(1000, new_flow=0).per_new_flow_cost == 0

    @pytest.mark.parametrize("costs", [(), (0,), (1000, -5)])
    def test_rejects_bad_stages(self, costs):
        with pytest.raises(ConfigError):
            _chain(*costs)

    def test_rejects_zero_batch(self):
        with pytest.raises(ConfigError):
            _chain(1000, batch=0)

    def test_rejects_negative_new_flow_cost(self):
        with pytest.raises(ConfigError):
            _chain(1000, new_flow=-1)

    def test_service_time(self):
        chain = _chain(1000, 500, new_flow=3000)
        assert service_time(chain, False) == 1500
        assert service_time(chain, True) == 4500


class TestSplitSchemes:
    def test_unsplit_label_and_level(self):
        assert UNSPLIT.n == 1
        assert UNSPLIT.label() == "-"
        assert SplitScheme((1, 3)).label() == "1,3"

    def test_sub_chain_costs(self):
        chain = _chain(1000, 2000, 3000, 4000)
        assert sub_chain_costs(chain, SplitScheme((2,))) == [3000, 7000]
        assert sub_chain_costs(chain, UNSPLIT) == [10000]

    @pytest.mark.parametrize("cuts", [(0,), (4,), (2, 2), (3, 1)])
    def test_invalid_cuts(self, cuts):
        chain = _chain(1000, 2000, 3000, 4000)
        with pytest.raises(SplitSchemeError):
            validate_scheme(chain, SplitScheme(cuts))

    def test_new_flow_shares_sum_to_whole(self):
        chain = _chain(1000, 2000, 3000, new_flow=1000)
        shares = sub_chain_new_flow_costs(chain, SplitScheme((1,)))
        assert shares == [166, 834]
        assert sum(shares) == chain.per_new_flow_cost

    def test_throughput_follows_bottleneck(self):
        chain = _chain(1000, 2000, 3000)
        assert split_throughput(chain, SplitScheme((2,))) == pytest.approx(1e9 / 3000)
        assert split_throughput(chain, UNSPLIT) == pytest.approx(1e9 / 6000)

    def test_latency_is_whole_chain(self):
        chain = _chain(1000, 2000, 3000)
        assert split_latency(chain, SplitScheme((1, 2))) == 6000


class TestEnumerateSplits:
    def test_counts_and_order(self):
        chain = _chain(1000, 2000, 3000)
        schemes = enumerate_splits(chain, 3)
        assert [s.n for s in schemes] == [1, 2, 2, 3]
        assert schemes[0] == UNSPLIT
        # (2,) balances 3000/3000 and beats (1,) at 1000/5000
        assert schemes[1] == SplitScheme((2,))
        assert schemes[2] == SplitScheme((1,))

    def test_capped_by_stage_count(self):
        chain = _chain(1000, 2000)
        assert len(enumerate_splits(chain, 5)) == 2

    def test_best_split(self):
        chain = _chain(1000, 2000, 3000)
        assert best_split(chain, 1) == UNSPLIT
        assert best_split(chain, 2) == SplitScheme((2,))
        assert best_split(chain, 4) is None
        assert best_split(chain, 0) is None
