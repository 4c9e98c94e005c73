import os
from unittest.mock import patch

import pytest
from pydantic import ValidationError

from mdivw.cli.configuration_manager import ConfigurationManager, RunConfig
from mdivw.utils.error_handling import ConfigFileError


def _manager(env=None, yaml_config=None):
    with patch.dict(os.environ, env or {}), patch("dotenv.load_dotenv"):
        manager = ConfigurationManager()
    if yaml_config is not None:
        manager._yaml_config = yaml_config
    return manager


@pytest.mark.unit
class TestConfigurationManager:
    """Test cases for ConfigurationManager."""

    def test_defaults_from_environment(self):
        """Test seed, workers, bootstrap reps and pleiotropy from MDIVW_* variables."""
        manager = _manager({"MDIVW_SEED": "42", "MDIVW_WORKERS": "3", "MDIVW_PLEIOTROPY": "yes"})
        defaults = manager.get_defaults()
        assert defaults["seed"] == 42
        assert defaults["workers"] == 3
        assert defaults["bootstrap_reps"] == 200
        assert defaults["pleiotropy"] is True

    def test_invalid_integer_env(self):
        """Test that a malformed integer falls back to the default with a warning."""
        with patch("mdivw.cli.configuration_manager.logger") as mock_logger:
            manager = _manager({"MDIVW_WORKERS": "many"})
            mock_logger.warning.assert_called()
        assert manager.get_defaults()["workers"] == 1

    def test_resolve_uses_defaults(self):
        """Test a run configuration built from defaults only."""
        config = _manager().resolve("analyze", {})
        assert config.command == "analyze"
        assert config.seed == 20240101
        assert config.methods == ["ivw", "divw", "mdivw"]
        assert config.lambda_ == 0.0

    def test_precedence(self):
        """Test flags over command section over top level over environment."""
        manager = _manager(
            {"MDIVW_SEED": "1"},
            {"seed": 2, "methods": "ivw", "lambda": 1.5, "analyze": {"seed": 3, "lambda": "auto"}},
        )
        config = manager.resolve("analyze", {"seed": None, "methods": "egger"})
        assert config.seed == 3
        assert config.lambda_ == "auto"
        assert config.methods == ["egger"]

        config = manager.resolve("simulate", {"seed": 4})
        assert config.seed == 4
        assert config.lambda_ == 1.5

    def test_scenario_merge_and_lambda(self):
        """Test that scenario sections merge and a scenario lambda is used as fallback."""
        manager = _manager(yaml_config={"scenario": {"p": 500, "s": 50, "lambda": 2.0}})
        config = manager.resolve("simulate", {"scenario": {"s": 25}})
        assert config.scenario == {"p": 500, "s": 25}
        assert config.lambda_ == 2.0

    def test_dashed_keys(self):
        """Test that YAML keys with dashes map onto field names."""
        manager = _manager(yaml_config={"bootstrap-reps": 500, "tau-in-residuals": True})
        config = manager.resolve("diagnose", {})
        assert config.bootstrap_reps == 500
        assert config.tau_in_residuals is True

    def test_load_yaml_config(self, tmp_path):
        """Test reading a YAML run file."""
        path = tmp_path / "run.yaml"
        path.write_text("methods: [mdivw, median]\nseed: 9\n")
        manager = _manager()
        manager.load_yaml_config(str(path))
        assert manager.get_yaml_config() == {"methods": ["mdivw", "median"], "seed": 9}

    def test_load_missing_yaml(self, tmp_path):
        """Test that an unreadable file is logged and raised."""
        manager = _manager()
        with patch("mdivw.cli.configuration_manager.logger") as mock_logger:
            with pytest.raises(ConfigFileError):
                manager.load_yaml_config(str(tmp_path / "missing.yaml"))
            mock_logger.error.assert_called()
        assert manager.get_yaml_config() == {}

    def test_malformed_yaml_raises(self, tmp_path):
        """Test that a YAML syntax error stops resolution instead of falling back to defaults."""
        path = tmp_path / "run.yaml"
        path.write_text("methods: [ivw\nlambda: auto\n")
        manager = _manager()
        with pytest.raises(ConfigFileError) as excinfo:
            manager.load_yaml_config(str(path))
        assert excinfo.value.code == "config_file_error"
        assert manager.get_yaml_config() == {}

    def test_non_mapping_yaml_raises(self, tmp_path):
        """Test that a YAML list at top level is rejected."""
        path = tmp_path / "run.yaml"
        path.write_text("- ivw\n- divw\n")
        with pytest.raises(ConfigFileError):
            _manager().load_yaml_config(str(path))

    def test_empty_yaml_is_empty_mapping(self, tmp_path):
        """Test that an empty run file contributes nothing."""
        path = tmp_path / "run.yaml"
        path.write_text("")
        manager = _manager()
        manager.load_yaml_config(str(path))
        assert manager.get_yaml_config() == {}


@pytest.mark.unit
class TestRunConfig:
    """Test cases for RunConfig."""

    def test_auto_lambda(self):
        """Test that auto resolves against the post-join SNP count."""
        config = RunConfig(command="analyze", seed=1, **{"lambda": "AUTO"})
        assert config.lambda_ == "auto"
        assert config.resolve_lambda(1000) == pytest.approx(3.7169, abs=1e-4)

    def test_numeric_lambda(self):
        """Test that numeric strings are accepted."""
        assert RunConfig(command="analyze", seed=1, **{"lambda": "2.5"}).resolve_lambda(10) == 2.5

    def test_negative_lambda(self):
        """Test that a negative threshold is rejected."""
        with pytest.raises(ValidationError):
            RunConfig(command="analyze", seed=1, **{"lambda": -1})

    def test_unknown_method(self):
        """Test that unknown methods are rejected."""
        with pytest.raises(ValidationError):
            RunConfig(command="analyze", seed=1, methods="ivw,foo")

    def test_schema_string(self):
        """Test the column mapping given as a string."""
        config = RunConfig(command="analyze", seed=1, schema="snp_id=rsid")
        assert config.schema_.snp_id == "rsid"

    def test_echo_uses_file_names(self):
        """Test that the echo writes lambda and schema under their file names."""
        echo = RunConfig(command="simulate", seed=1).echo()
        assert echo["lambda"] == 0.0
        assert "schema" in echo
        assert echo["seed"] == 1
