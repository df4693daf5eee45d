import pytest

from qrainbow.config import RunConfig, load_config, parse_p_grid, read_config_file
from qrainbow.errors import ConfigError
from qrainbow.globalvars import DEFAULT_K, DEFAULT_SEED


class TestPGrid:
    def test_default_grid(self):
        assert parse_p_grid("0:0.1:0.01") == [round(0.01 * i, 2) for i in range(11)]

    def test_single_point(self):
        assert parse_p_grid("0.5:0.5:0.1") == [0.5]

    @pytest.mark.parametrize("spec", ["0:0.1", "a:b:c", "0:0.1:0", "0.2:0.1:0.01", "0:2:0.5"])
    def test_invalid(self, spec):
        with pytest.raises(ConfigError):
            parse_p_grid(spec)


class TestRunConfig:
    def test_defaults(self):
        config = RunConfig()
        assert (config.k, config.seed) == (DEFAULT_K, DEFAULT_SEED)

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# experiment\nseed = 9\nt=32\nhash=sha256\np-grid=0:0.05:0.01\n")
        config = load_config(path, t=8, m=None)
        assert config.seed == 9
        assert config.t == 8
        assert config.hash_algorithm == "sha256"
        assert config.p_grid == "0:0.05:0.01"

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("colour=blue\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("seed 9\n")
        with pytest.raises(ConfigError):
            read_config_file(path)

    def test_bad_values(self):
        with pytest.raises(ConfigError):
            RunConfig().with_overrides(seed="nine")
        with pytest.raises(ConfigError):
            RunConfig(engine="annealer")
        with pytest.raises(ConfigError):
            RunConfig(shots=0)
