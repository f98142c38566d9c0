"""Constants for the refined DT toolkit."""

from typing import Final

NAME: Final = "refined-dt"
VERSION: Final = "1.0.0"

# Ring modes
RING_LAURENT: Final = "laurent"
RING_JET: Final = "jet"
RING_FLOAT_JET: Final = "float-jet"
RING_INTEGER: Final = "integer"
RING_FLOAT: Final = "float"

RING_MODES: Final = (RING_LAURENT, RING_JET, RING_FLOAT_JET)
MACMAHON_RING_MODES: Final = (RING_INTEGER, RING_FLOAT)

# Expansion methods
METHOD_AUTO: Final = "auto"
METHOD_FACTORS: Final = "factors"
METHOD_LAYERS: Final = "layers"

# Above this truncation the jet ring switches from factor-by-factor
# expansion to the derivative-layer recurrence.
FACTOR_METHOD_MAX_N: Final = 64

# Moment sources
SOURCE_ORACLE: Final = "oracle"
SOURCE_LAURENT: Final = "laurent"
SOURCE_JET: Final = "jet"

# Default values
DEFAULT_JET_ORDER: Final = 8
DEFAULT_ENUMERATION_CAP: Final = 20
DEFAULT_LAURENT_CAP: Final = 1000
DEFAULT_JET_CAP: Final = 20_000
# exact log p_n in the asymptotics table is skipped above this size
ASYMPTOTICS_EXACT_MAX_N: Final = 5000
DEFAULT_DELTA: Final = 0
DEFAULT_GUARD_DIGITS: Final = 30
DEFAULT_TAIL_MASS: Final = 1e-9
DEFAULT_TARGET_ACCEPTED: Final = 1000
DEFAULT_ATTEMPT_BUDGET: Final = 10_000_000
DEFAULT_PILOT_DRAWS: Final = 20_000
DEFAULT_BATCH_SIZE: Final = 2048
DEFAULT_SEED: Final = 0
DEFAULT_WORKERS: Final = 1
DEFAULT_WINDOW: Final = 0
DEFAULT_MPMATH_DPS: Final = 40
DEFAULT_ORACLE_N_CAP: Final = 10
DEFAULT_DELTAS: Final = (0, 1, 3)
DEFAULT_K_MAX: Final = 4

# Output formatting
FLOAT_SIGNIFICANT_DIGITS: Final = 17
CONSTANTS_SIGNIFICANT_DIGITS: Final = 15

# CSV columns
SERIES_LAURENT_COLUMNS: Final = ("n", "coefficient")
MOMENT_REPORT_COLUMNS: Final = (
    "n",
    "k",
    "raw_num",
    "raw_den",
    "normalized",
    "gauss_ref",
    "abs_error",
)
DISTRIBUTION_COLUMNS: Final = ("s", "prob_num", "prob_den", "std_s", "cdf", "normal_cdf")
SAMPLE_COLUMNS: Final = ("worker", "counter", "size", "stat", "trace_proxy")
ASYMPTOTICS_COLUMNS: Final = ("n", "log_exact", "log_wright", "ratio")
ORACLE_COLUMNS: Final = ("n", "delta", "status", "exponent", "expected", "actual")
FLOAT_JET_COLUMNS: Final = ("n", "log_count")

# Subcommands
CMD_EXPAND: Final = "expand"
CMD_ORACLE_CHECK: Final = "oracle-check"
CMD_MOMENTS: Final = "moments"
CMD_ASYMPTOTICS: Final = "asymptotics"
CMD_SAMPLE: Final = "sample"
CMD_CONSTANTS: Final = "constants"

# Config keys
CONF_DELTA: Final = "delta"
CONF_DELTAS: Final = "deltas"
CONF_N_MAX: Final = "n_max"
CONF_N_CAP: Final = "n_cap"
CONF_N_LIST: Final = "n_list"
CONF_K_MAX: Final = "k_max"
CONF_RING_MODE: Final = "ring_mode"
CONF_ORDER: Final = "order"
CONF_HALF_POWER: Final = "half_power"
CONF_MODE: Final = "mode"
CONF_N: Final = "n"
CONF_RADIUS_N: Final = "radius_N"
CONF_M_MAX: Final = "m_max"
CONF_WINDOW: Final = "window"
CONF_SEED: Final = "seed"
CONF_TARGET_ACCEPTED: Final = "target_accepted"
CONF_ATTEMPT_BUDGET: Final = "attempt_budget"
CONF_WORKERS: Final = "workers"
CONF_BATCH_SIZE: Final = "batch_size"

# Exit codes
EXIT_OK: Final = 0
EXIT_MISMATCH: Final = 1
EXIT_INVALID_FLAGS: Final = 2
EXIT_CAP_VIOLATION: Final = 3
EXIT_ACCEPTANCE_COLLAPSE: Final = 4
