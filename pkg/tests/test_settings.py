# Codes By Visionnn

import pytest

from errors import ConfigError
from settings import ExperimentConfig, config_hash, load_config, sweep


def _write(tmp_path, text: str):
    path = tmp_path / "experiment.yaml"
    path.write_text(text)
    return path


class TestLoadConfig:
    def test_defaults_without_a_file(self):
        config = load_config()
        assert config.source is None
        assert config.slos_ns == [200_000]
        assert config.chain.to_chain().max_batch == 32

    def test_yaml_sections(self, tmp_path):
        path = _write(tmp_path, """
seed: 9
slos_us: [100, 400]
modes: [full, hash_only]
chain:
  stages:
    - {name: firewall, cost_ns: 800}
    - {name: nat, cost_ns: 1200}
  max_batch: 16
workload:
  flow_rate: 1000
  storms:
    - {start_s: 0.1, window_s: 0.01, flows: 500}
""")
        config = load_config(path)
        chain = config.chain.to_chain()
        assert [s.name for s in chain.stages] == ["firewall", "nat"]
        assert chain.total_cost == 2000
        assert config.workload.storms[0].flows == 500
        assert config.source == str(path)

    def test_overrides_win(self, tmp_path):
        path = _write(tmp_path, "rack:\n  servers: 2\n")
        config = load_config(path, ["rack.servers=4", "slos_us=[50, 100]", "output.verbose=true"])
        assert config.rack.servers == 4
        assert config.slos_us == [50, 100]
        assert config.output.verbose is True

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ConfigError, match="rack.bogus"):
            load_config(_write(tmp_path, "rack:\n  bogus: 1\n"))
        with pytest.raises(ConfigError, match="nonsense"):
            load_config(None, ["nonsense=1"])

    def test_unknown_stage_key(self, tmp_path):
        with pytest.raises(ConfigError, match="chain.stages"):
            load_config(_write(tmp_path, "chain:\n  stages:\n    - {name: a, cost: 1}\n"))

    def test_invalid_yaml(self, tmp_path):
        with pytest.raises(ConfigError, match="invalid YAML"):
            load_config(_write(tmp_path, "rack: [unclosed\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.yaml")

    def test_malformed_override(self):
        with pytest.raises(ConfigError):
            load_config(None, ["rack.servers"])
        with pytest.raises(ConfigError):
            load_config(None, ["rack.a.b=1"])


class TestValidate:
    @pytest.mark.parametrize(
        "override",
        [
            "modes=[turbo]",
            "slos_us=[-5]",
            "rack.aux_pool_size=32",
            "server_mapper.safety_margin=1.0",
            "ingress.prefix_len=33",
            "training.flow_grid=[4, 2]",
            "predictors.source=oracle",
            "workload.trace=/no/such/trace.csv",
            "output.jobs=0",
        ],
    )
    def test_rejects(self, override):
        with pytest.raises(ConfigError):
            load_config(None, [override])

    def test_bad_batch_is_config_error(self):
        with pytest.raises(ConfigError):
            load_config(None, ["chain.max_batch=0"])


class TestHashAndSweep:
    def test_hash_is_stable_and_ignores_source(self, tmp_path):
        first = load_config(_write(tmp_path, "seed: 3\n"))
        second = ExperimentConfig.from_dict({"seed": 3})
        assert config_hash(first) == config_hash(second)

    def test_hash_tracks_content(self):
        assert config_hash(ExperimentConfig(seed=1)) != config_hash(ExperimentConfig(seed=2))

    def test_sweep_order(self):
        config = ExperimentConfig(slos_us=[100, 200], modes=["full", "hash_only"])
        assert sweep(config) == [(100, "full"), (100, "hash_only"), (200, "full"), (200, "hash_only")]
