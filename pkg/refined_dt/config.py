"""Parameter validation for every subcommand."""

from __future__ import annotations

import json
import logging
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import voluptuous as vol

from .const import (
    CONF_ATTEMPT_BUDGET,
    CONF_BATCH_SIZE,
    CONF_DELTA,
    CONF_DELTAS,
    CONF_HALF_POWER,
    CONF_K_MAX,
    CONF_M_MAX,
    CONF_MODE,
    CONF_N,
    CONF_N_CAP,
    CONF_N_LIST,
    CONF_N_MAX,
    CONF_ORDER,
    CONF_RADIUS_N,
    CONF_RING_MODE,
    CONF_SEED,
    CONF_TARGET_ACCEPTED,
    CONF_WINDOW,
    CONF_WORKERS,
    DEFAULT_ATTEMPT_BUDGET,
    DEFAULT_BATCH_SIZE,
    DEFAULT_DELTA,
    DEFAULT_JET_ORDER,
    DEFAULT_SEED,
    DEFAULT_TARGET_ACCEPTED,
    DEFAULT_WINDOW,
    DEFAULT_WORKERS,
    RING_LAURENT,
    RING_MODES,
    SOURCE_JET,
    SOURCE_LAURENT,
    SOURCE_ORACLE,
)
from .sampler import SamplerConfig

_LOGGER = logging.getLogger(__name__)

__all__ = [
    "ASYMPTOTICS_SCHEMA",
    "EXPAND_SCHEMA",
    "MOMENTS_SCHEMA",
    "ORACLE_SCHEMA",
    "SAMPLER_SCHEMA",
    "load_json_config",
    "merge_config",
    "sampler_config_from",
    "validate",
]

NON_NEGATIVE_INT = vol.All(vol.Coerce(int), vol.Range(min=0))
POSITIVE_INT = vol.All(vol.Coerce(int), vol.Range(min=1))
SIZE_LIST = vol.All([POSITIVE_INT], vol.Length(min=1))


def _order_covers_k_max(data: dict[str, Any]) -> dict[str, Any]:
    """Reject an explicit jet order below k_max."""
    order = data.get(CONF_ORDER, data[CONF_K_MAX])
    if data[CONF_K_MAX] > order:
        raise vol.Invalid(f"k_max={data[CONF_K_MAX]} exceeds the jet order {order}")
    return data


def _half_power_needs_laurent(data: dict[str, Any]) -> dict[str, Any]:
    """Reject --half-power outside the Laurent ring."""
    if data[CONF_HALF_POWER] and data[CONF_RING_MODE] != RING_LAURENT:
        raise vol.Invalid("--half-power only applies to the laurent ring")
    return data


# Subcommand schemas
EXPAND_SCHEMA = vol.Schema(
    vol.All(
        {
            vol.Optional(CONF_DELTA, default=DEFAULT_DELTA): NON_NEGATIVE_INT,
            vol.Required(CONF_N_MAX): NON_NEGATIVE_INT,
            vol.Optional(CONF_RING_MODE, default=RING_LAURENT): vol.In(RING_MODES),
            vol.Optional(CONF_ORDER, default=DEFAULT_JET_ORDER): NON_NEGATIVE_INT,
            vol.Optional(CONF_HALF_POWER, default=False): vol.Boolean(),
        },
        _half_power_needs_laurent,
    )
)

ORACLE_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_N_CAP): NON_NEGATIVE_INT,
        vol.Optional(CONF_DELTAS, default=[0, 1, 3]): vol.All([NON_NEGATIVE_INT], vol.Length(min=1)),
    }
)

MOMENTS_SCHEMA = vol.Schema(
    vol.All(
        {
            vol.Required(CONF_K_MAX): NON_NEGATIVE_INT,
            vol.Required(CONF_N_LIST): SIZE_LIST,
            vol.Optional(CONF_MODE, default=SOURCE_JET): vol.In(
                (SOURCE_JET, SOURCE_LAURENT, SOURCE_ORACLE)
            ),
            vol.Optional(CONF_ORDER): NON_NEGATIVE_INT,
            vol.Optional(CONF_DELTA, default=DEFAULT_DELTA): NON_NEGATIVE_INT,
        },
        _order_covers_k_max,
    )
)

ASYMPTOTICS_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_N_LIST): SIZE_LIST,
    }
)

SAMPLER_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_N): NON_NEGATIVE_INT,
        vol.Optional(CONF_RADIUS_N): vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False)),
        vol.Optional(CONF_M_MAX): POSITIVE_INT,
        vol.Optional(CONF_WINDOW, default=DEFAULT_WINDOW): NON_NEGATIVE_INT,
        vol.Optional(CONF_SEED, default=DEFAULT_SEED): vol.All(
            vol.Coerce(int), vol.Range(min=0, max=2**64 - 1)
        ),
        vol.Optional(CONF_TARGET_ACCEPTED, default=DEFAULT_TARGET_ACCEPTED): POSITIVE_INT,
        vol.Optional(CONF_ATTEMPT_BUDGET, default=DEFAULT_ATTEMPT_BUDGET): POSITIVE_INT,
        vol.Optional(CONF_WORKERS, default=DEFAULT_WORKERS): POSITIVE_INT,
        vol.Optional(CONF_BATCH_SIZE, default=DEFAULT_BATCH_SIZE): POSITIVE_INT,
    }
)


def validate(schema: vol.Schema, params: Mapping[str, Any]) -> dict[str, Any]:
    """Validate ``params``, ignoring keys whose value is None (unset flags)."""
    cleaned = {key: value for key, value in params.items() if value is not None}
    try:
        return schema(cleaned)
    except vol.Invalid as err:
        _LOGGER.debug("Rejected parameters %s: %s", cleaned, err)
        raise


def load_json_config(path: Path) -> dict[str, Any]:
    """Read a JSON object of parameters."""
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise vol.Invalid(f"cannot read config file {path}: {err}") from err
    if not isinstance(data, dict):
        raise vol.Invalid(f"config file {path} must hold a JSON object")
    return data


def merge_config(file_values: Mapping[str, Any], flag_values: Mapping[str, Any]) -> dict[str, Any]:
    """Explicit flags win over file values."""
    merged = dict(file_values)
    merged.update({key: value for key, value in flag_values.items() if value is not None})
    return merged


def sampler_config_from(params: Mapping[str, Any]) -> SamplerConfig:
    """Validate sampler parameters and build the frozen config."""
    data = validate(SAMPLER_SCHEMA, params)
    return SamplerConfig(
        n=data[CONF_N],
        radius_N=data.get(CONF_RADIUS_N),
        m_max=data.get(CONF_M_MAX),
        window=data[CONF_WINDOW],
        seed=data[CONF_SEED],
        target_accepted=data[CONF_TARGET_ACCEPTED],
        attempt_budget=data[CONF_ATTEMPT_BUDGET],
        workers=data[CONF_WORKERS],
        batch_size=data[CONF_BATCH_SIZE],
    )
