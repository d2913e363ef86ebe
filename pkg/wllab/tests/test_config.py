"""
Tests for wllab.config module
"""

import pytest
from pydantic import ValidationError as PydanticValidationError

from wllab.config import (
    DEFAULT_CAPS, Settings, apply_overrides, get_environment_config, get_logging_config,
    override_settings, settings,
)
from wllab.exceptions import ConfigurationError


class TestSettings:
    """Test defaults and environment loading"""

    def test_defaults(self):
        fresh = Settings(_env_file=None)

        assert fresh.CAP_TUPLES == 2 ** 24
        assert fresh.CAP_BRUTE_FORCE == 8
        assert fresh.LOG_LEVEL == "INFO"
        assert not fresh.EXTENDED

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("WLLAB_CAP_SIM", "512")
        monkeypatch.setenv("WLLAB_LOG_LEVEL", "debug")
        monkeypatch.setenv("WLLAB_EXTENDED", "true")
        fresh = Settings(_env_file=None)

        assert fresh.CAP_SIM == 512
        assert fresh.LOG_LEVEL == "DEBUG"
        assert fresh.EXTENDED

    def test_non_positive_cap(self, monkeypatch):
        monkeypatch.setenv("WLLAB_CAP_TUPLES", "0")
        with pytest.raises(PydanticValidationError):
            Settings(_env_file=None)

    def test_unknown_log_level(self):
        with pytest.raises(PydanticValidationError):
            Settings(_env_file=None, LOG_LEVEL="chatty")

    def test_cap_lookup(self):
        assert settings.cap("ep_n") == settings.CAP_EP_N
        assert settings.cap("ep_n", 3) == 3

    def test_default_caps(self):
        assert set(DEFAULT_CAPS) == {name for name in Settings.model_fields if name.startswith("CAP_")}
        assert DEFAULT_CAPS["CAP_EP_K"] == 2


class TestOverrides:
    """Test temporary overrides of the global settings"""

    def test_restored(self):
        before = settings.CAP_TUPLES
        with override_settings(cap_tuples=99, seed=None) as active:
            assert active.CAP_TUPLES == 99
        assert settings.CAP_TUPLES == before

    def test_restored_after_error(self):
        before = settings.SEED
        with pytest.raises(RuntimeError):
            with override_settings(seed=1):
                raise RuntimeError("boom")
        assert settings.SEED == before

    def test_invalid_override(self):
        before = settings.CAP_SIM
        with pytest.raises(ConfigurationError) as info:
            apply_overrides(cap_sim=-1)

        assert info.value.details["config_key"] == "CAP_SIM"
        assert settings.CAP_SIM == before


class TestLoggingConfig:
    """Test the dictConfig builder"""

    def test_default_level(self):
        config = get_logging_config()

        assert config["loggers"]["wllab"]["level"] == settings.LOG_LEVEL
        assert config["handlers"]["console"]["stream"] == "ext://sys.stderr"

    def test_debug_uses_detailed_format(self):
        config = get_logging_config("debug")

        assert config["loggers"]["wllab"]["level"] == "DEBUG"
        assert config["handlers"]["console"]["formatter"] == "detailed"

    def test_environment_summary(self):
        summary = get_environment_config()

        assert summary["seed"] == settings.SEED
        assert set(summary["caps"]) == set(DEFAULT_CAPS)
