"""Tests for parameter validation."""

from __future__ import annotations

import json

import pytest
import voluptuous as vol

from refined_dt.config import (
    EXPAND_SCHEMA,
    MOMENTS_SCHEMA,
    ORACLE_SCHEMA,
    SAMPLER_SCHEMA,
    load_json_config,
    merge_config,
    sampler_config_from,
    validate,
)
from refined_dt.const import RING_JET, RING_LAURENT


class TestSchemas:
    """Test the subcommand schemas."""

    def test_expand_defaults(self):
        """Test defaults fill in and strings are coerced."""
        data = validate(EXPAND_SCHEMA, {"n_max": "5", "delta": None})

        assert data == {
            "delta": 0,
            "n_max": 5,
            "ring_mode": RING_LAURENT,
            "order": 8,
            "half_power": False,
        }

    def test_expand_rejects_negative(self):
        """Test negative sizes."""
        with pytest.raises(vol.Invalid):
            validate(EXPAND_SCHEMA, {"n_max": -1})
        with pytest.raises(vol.Invalid):
            validate(EXPAND_SCHEMA, {"n_max": 3, "delta": -2})

    def test_half_power_needs_laurent(self):
        """Test --half-power with the jet ring."""
        with pytest.raises(vol.Invalid, match="half-power"):
            validate(EXPAND_SCHEMA, {"n_max": 3, "ring_mode": RING_JET, "half_power": True})

    def test_unknown_ring(self):
        """Test ring names outside the known set."""
        with pytest.raises(vol.Invalid):
            validate(EXPAND_SCHEMA, {"n_max": 3, "ring_mode": "matrix"})

    def test_oracle_defaults(self):
        """Test the default delta list."""
        assert validate(ORACLE_SCHEMA, {"n_cap": 4}) == {"n_cap": 4, "deltas": [0, 1, 3]}

    def test_moments_order_covers_k_max(self):
        """Test an explicit order below k_max."""
        with pytest.raises(vol.Invalid, match="exceeds the jet order"):
            validate(MOMENTS_SCHEMA, {"k_max": 4, "n_list": [10], "order": 2})

        data = validate(MOMENTS_SCHEMA, {"k_max": 4, "n_list": [10]})
        assert "order" not in data

    def test_moments_size_list(self):
        """Test empty or non-positive size lists."""
        with pytest.raises(vol.Invalid):
            validate(MOMENTS_SCHEMA, {"k_max": 2, "n_list": []})
        with pytest.raises(vol.Invalid):
            validate(MOMENTS_SCHEMA, {"k_max": 2, "n_list": [0, 5]})

    @pytest.mark.parametrize(
        "params",
        [{"n": 5, "radius_N": 0}, {"n": 5, "seed": -1}, {"n": 5, "seed": 2**64}, {"n": 5, "workers": 0}],
    )
    def test_sampler_rejects(self, params):
        """Test out-of-range sampler parameters."""
        with pytest.raises(vol.Invalid):
            validate(SAMPLER_SCHEMA, params)


class TestConfigFiles:
    """Test JSON config loading and merging."""

    def test_load(self, tmp_path):
        """Test a JSON object is read."""
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"n": 12, "seed": 3}))

        assert load_json_config(path) == {"n": 12, "seed": 3}

    def test_load_failures(self, tmp_path):
        """Test missing files, bad JSON and non-objects."""
        with pytest.raises(vol.Invalid):
            load_json_config(tmp_path / "missing.json")
        broken = tmp_path / "broken.json"
        broken.write_text("{")
        with pytest.raises(vol.Invalid):
            load_json_config(broken)
        listing = tmp_path / "list.json"
        listing.write_text("[1, 2]")
        with pytest.raises(vol.Invalid, match="JSON object"):
            load_json_config(listing)

    def test_flags_win(self):
        """Test explicit flags override file values and unset flags do not."""
        merged = merge_config({"n": 12, "seed": 3}, {"seed": 9, "window": None})

        assert merged == {"n": 12, "seed": 9}

    def test_sampler_config_from(self):
        """Test the frozen config is built from validated values."""
        config = sampler_config_from({"n": 20, "radius_N": "2.5", "seed": 11, "workers": 2})

        assert config.n == 20
        assert config.radius == 2.5
        assert config.seed == 11
        assert config.workers == 2
