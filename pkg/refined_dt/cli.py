"""Command-line front end: reproducible runs that emit CSV and JSON artifacts."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import voluptuous as vol

from . import __version__
from .asym import (
    constants_dict,
    log_of_int,
    theorem1_params,
    wright_pn,
)
from .config import (
    ASYMPTOTICS_SCHEMA,
    EXPAND_SCHEMA,
    MOMENTS_SCHEMA,
    ORACLE_SCHEMA,
    load_json_config,
    merge_config,
    sampler_config_from,
    validate,
)
from .const import (
    ASYMPTOTICS_COLUMNS,
    ASYMPTOTICS_EXACT_MAX_N,
    CMD_ASYMPTOTICS,
    CMD_CONSTANTS,
    CMD_EXPAND,
    CMD_MOMENTS,
    CMD_ORACLE_CHECK,
    CMD_SAMPLE,
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
    CONSTANTS_SIGNIFICANT_DIGITS,
    DEFAULT_DELTAS,
    DEFAULT_ENUMERATION_CAP,
    DEFAULT_JET_CAP,
    DEFAULT_K_MAX,
    DEFAULT_LAURENT_CAP,
    DEFAULT_ORACLE_N_CAP,
    DEFAULT_SEED,
    DEFAULT_WORKERS,
    DISTRIBUTION_COLUMNS,
    EXIT_ACCEPTANCE_COLLAPSE,
    EXIT_CAP_VIOLATION,
    EXIT_INVALID_FLAGS,
    EXIT_MISMATCH,
    EXIT_OK,
    FLOAT_JET_COLUMNS,
    MOMENT_REPORT_COLUMNS,
    NAME,
    ORACLE_COLUMNS,
    RING_JET,
    RING_LAURENT,
    RING_MODES,
    SAMPLE_COLUMNS,
    SOURCE_JET,
    SOURCE_LAURENT,
    SOURCE_ORACLE,
)
from .errors import (
    AcceptanceCollapseError,
    CapViolationError,
    EnumerationCapError,
    ExpansionCapError,
    OracleMismatchError,
    PmfUnavailableError,
)
from .expand import FloatJetSeries, expand_M_delta, series_to_csv
from .moments import (
    convergence_report,
    distribution_rows,
    distribution_table,
    ks_distance,
    moment_report_rows,
)
from .output import RunManifest, comment_block, csv_text, format_float, write_artifact
from .partitions import refined_poly_oracle
from .qseries import LaurentPoly
from .sampler import sample_conditioned, trace_proxy_matches_oracle
from .store import SeriesStore

_LOGGER = logging.getLogger(__name__)

# trace_proxy is checked against enumeration up to this size
TRACE_PROXY_CHECK_N = 8

# oracle sizes are bounded by the enumeration cap instead
MOMENT_SOURCE_CAPS = {SOURCE_LAURENT: DEFAULT_LAURENT_CAP, SOURCE_JET: DEFAULT_JET_CAP}

__all__ = ["CommandResult", "OracleResult", "build_parser", "main", "oracle_check"]


@dataclass
class CommandResult:
    """Main artifact of a subcommand plus any side artifacts."""

    text: str
    suffix: str = ".csv"
    parameters: dict[str, Any] = field(default_factory=dict)
    extras: dict[str, str] = field(default_factory=dict)
    exit_code: int = EXIT_OK


@dataclass(frozen=True)
class OracleResult:
    """Outcome of comparing one expansion coefficient with enumeration."""

    n: int
    delta: int
    mismatch: OracleMismatchError | None = None

    @property
    def passed(self) -> bool:
        """Whether expansion and enumeration agree."""
        return self.mismatch is None

    def row(self) -> tuple[Any, ...]:
        """CSV row in ORACLE_COLUMNS order."""
        if self.mismatch is None:
            return (self.n, self.delta, "PASS", "", "", "")
        m = self.mismatch
        return (self.n, self.delta, "FAIL", m.exponent, m.expected, m.actual)


def _first_difference(n: int, delta: int, expected: LaurentPoly, actual: LaurentPoly) -> OracleMismatchError | None:
    """Mismatch at the lowest differing exponent, or None."""
    for exponent in sorted(set(expected.terms) | set(actual.terms)):
        want, got = expected.coefficient(exponent), actual.coefficient(exponent)
        if want != got:
            return OracleMismatchError(n, delta, exponent, want, got)
    return None


def oracle_check(
    n_cap: int,
    deltas: Sequence[int],
    expander: Callable[..., Any] | None = None,
) -> list[OracleResult]:
    """Compare [t^n] M_delta from ``expander`` with enumeration for n <= n_cap."""
    if n_cap > DEFAULT_ENUMERATION_CAP:
        raise EnumerationCapError(n_cap, DEFAULT_ENUMERATION_CAP)
    expand = expander or expand_M_delta
    results = []
    for delta in deltas:
        series = expand(delta, n_cap, RING_LAURENT)
        for n in range(n_cap + 1):
            mismatch = _first_difference(n, delta, refined_poly_oracle(n, delta), series[n])
            if mismatch is not None:
                _LOGGER.error("Oracle mismatch: %s", mismatch)
            results.append(OracleResult(n, delta, mismatch))
    return results


def _manifest_comments(command: str, parameters: dict[str, Any]) -> dict[str, Any]:
    """Comment block carrying the deterministic manifest."""
    manifest = RunManifest(subcommand=command, parameters=parameters, version=__version__)
    return {"manifest": manifest.deterministic_json()}


def cmd_expand(args: argparse.Namespace) -> CommandResult:
    """Expand M_delta to t^nmax in the requested ring."""
    params = validate(
        EXPAND_SCHEMA,
        {
            CONF_DELTA: args.delta,
            CONF_N_MAX: args.nmax,
            CONF_RING_MODE: args.ring,
            CONF_ORDER: args.order,
            CONF_HALF_POWER: args.half_power,
        },
    )
    ring = params[CONF_RING_MODE]
    cap = {RING_LAURENT: DEFAULT_LAURENT_CAP, RING_JET: DEFAULT_JET_CAP}.get(ring)
    series = expand_M_delta(
        params[CONF_DELTA],
        params[CONF_N_MAX],
        ring,
        order=params[CONF_ORDER],
        half_power=params[CONF_HALF_POWER],
        cap=cap,
    )
    comments = _manifest_comments(CMD_EXPAND, params)
    if params[CONF_HALF_POWER]:
        comments["exponent_unit"] = "q^1/2"
    if isinstance(series, FloatJetSeries):
        comments["approximate"] = 1
        header = FLOAT_JET_COLUMNS + tuple(f"m{k}" for k in range(1, series.order + 1))
        rows = [
            (n, series.log_count(n), *(series.moment_ratio(n, k) for k in range(1, series.order + 1)))
            for n in range(series.n_max + 1)
        ]
        return CommandResult(csv_text(header, rows, comments), parameters=params)
    return CommandResult(comment_block(comments) + series_to_csv(series), parameters=params)


def cmd_oracle_check(args: argparse.Namespace) -> CommandResult:
    """Compare the expansion with enumeration."""
    params = validate(ORACLE_SCHEMA, {CONF_N_CAP: args.n_cap, CONF_DELTAS: args.deltas})
    results = oracle_check(params[CONF_N_CAP], params[CONF_DELTAS])
    failed = [r for r in results if not r.passed]
    comments = _manifest_comments(CMD_ORACLE_CHECK, params)
    comments["result"] = "FAIL" if failed else "PASS"
    if failed:
        print(f"FAIL: {failed[0].mismatch}", file=sys.stderr)
    return CommandResult(
        csv_text(ORACLE_COLUMNS, [r.row() for r in results], comments),
        parameters=params,
        exit_code=EXIT_MISMATCH if failed else EXIT_OK,
    )


def cmd_moments(args: argparse.Namespace) -> CommandResult:
    """Normalized moments against the Gaussian limit, optionally with pmf tables."""
    params = validate(
        MOMENTS_SCHEMA,
        {
            CONF_K_MAX: args.k_max,
            CONF_N_LIST: args.n_list,
            CONF_MODE: args.mode,
            CONF_ORDER: args.order,
            CONF_DELTA: args.delta,
        },
    )
    mode, delta = params[CONF_MODE], params[CONF_DELTA]
    if args.distribution and mode == SOURCE_JET:
        raise PmfUnavailableError("jet mode carries moments only; pass --mode laurent or oracle with --distribution")
    n_top = max(params[CONF_N_LIST])
    cap = MOMENT_SOURCE_CAPS.get(mode)
    if cap is not None and n_top > cap:
        raise ExpansionCapError(n_top, cap, mode)
    store = SeriesStore()
    order = params.get(CONF_ORDER, params[CONF_K_MAX]) if mode == SOURCE_JET else None
    rows = []
    for k in range(params[CONF_K_MAX] + 1):
        reports = convergence_report(k, params[CONF_N_LIST], delta=delta, source=mode, order=order, store=store)
        rows.extend(moment_report_rows(reports))
    result = CommandResult(
        csv_text(MOMENT_REPORT_COLUMNS, rows, _manifest_comments(CMD_MOMENTS, params)), parameters=params
    )
    if args.distribution:
        for n in sorted(set(params[CONF_N_LIST])):
            table = distribution_table(n, delta, mode, store=store)
            comments = {"n": n, "delta": delta, "ks_distance": ks_distance(table)}
            result.extras[f"distribution_n{n}.csv"] = csv_text(
                DISTRIBUTION_COLUMNS, distribution_rows(table), comments
            )
    return result


def cmd_asymptotics(args: argparse.Namespace) -> CommandResult:
    """log p_n next to Wright's formula."""
    params = validate(ASYMPTOTICS_SCHEMA, {CONF_N_LIST: args.n_list})
    ns = sorted(set(params[CONF_N_LIST]))
    exact_ns = [n for n in ns if n <= ASYMPTOTICS_EXACT_MAX_N]
    store = SeriesStore()
    if exact_ns:
        store.count_series(exact_ns[-1])
    rows = []
    for n in ns:
        log_wright = wright_pn(n, log_scale=True)
        if n <= ASYMPTOTICS_EXACT_MAX_N:
            log_exact = log_of_int(store.count(n))
            rows.append((n, log_exact, log_wright, math.exp(log_exact - log_wright)))
        else:
            rows.append((n, "", log_wright, ""))
    result = CommandResult(
        csv_text(ASYMPTOTICS_COLUMNS, rows, _manifest_comments(CMD_ASYMPTOTICS, params)), parameters=params
    )
    result.extras["constants.json"] = _constants_json()
    return result


def _constants_json() -> str:
    """Rounded constants as sorted JSON."""
    values = {key: float(format_float(value, CONSTANTS_SIGNIFICANT_DIGITS)) for key, value in constants_dict().items()}
    return json.dumps(values, sort_keys=True, indent=2) + "\n"


def cmd_constants(args: argparse.Namespace) -> CommandResult:
    """Dump the asymptotic constants."""
    return CommandResult(_constants_json(), suffix=".json")


def cmd_sample(args: argparse.Namespace) -> CommandResult:
    """Draw conditioned samples."""
    file_values = load_json_config(Path(args.config)) if args.config else {}
    flags = {
        CONF_N: args.n,
        CONF_RADIUS_N: args.radius_N,
        CONF_M_MAX: args.m_max,
        CONF_WINDOW: args.window,
        CONF_SEED: args.seed,
        CONF_TARGET_ACCEPTED: args.target_accepted,
        CONF_ATTEMPT_BUDGET: args.attempt_budget,
        CONF_WORKERS: args.workers,
        CONF_BATCH_SIZE: args.batch_size,
    }
    config = sampler_config_from(merge_config(file_values, flags))
    params = config.as_dict()
    records = list(sample_conditioned(config))

    scale = config.n ** (2.0 / 3.0) if config.n else 1.0
    normalized = np.asarray([r.stat for r in records], dtype=np.float64) / scale
    _, sigma2 = theorem1_params(0)
    comments = _manifest_comments(CMD_SAMPLE, params)
    comments["stat_mean"] = float(normalized.mean())
    comments["stat_variance"] = float(normalized.var(ddof=1)) if normalized.size > 1 else 0.0
    comments["sigma2_limit"] = sigma2
    if config.window:
        comments["approximate"] = 1
    validated = all(trace_proxy_matches_oracle(m) for m in range(1, TRACE_PROXY_CHECK_N + 1))
    comments["trace_proxy"] = f"validated_n_le_{TRACE_PROXY_CHECK_N}" if validated else "unvalidated"
    if not validated:
        _LOGGER.warning("trace_proxy disagrees with enumeration; treat that column as unvalidated")
    rows = [(r.worker, r.counter, r.size, r.stat, r.trace_proxy) for r in records]
    return CommandResult(csv_text(SAMPLE_COLUMNS, rows, comments), parameters=params)


COMMANDS: dict[str, Callable[[argparse.Namespace], CommandResult]] = {
    CMD_EXPAND: cmd_expand,
    CMD_ORACLE_CHECK: cmd_oracle_check,
    CMD_MOMENTS: cmd_moments,
    CMD_ASYMPTOTICS: cmd_asymptotics,
    CMD_SAMPLE: cmd_sample,
    CMD_CONSTANTS: cmd_constants,
}


def build_parser() -> argparse.ArgumentParser:
    """Make the refined-dt parser."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"Random seed (default {DEFAULT_SEED}).")
    common.add_argument(
        "--threads",
        "--workers",
        dest="workers",
        type=int,
        default=None,
        help=f"Worker count for sampling (default {DEFAULT_WORKERS}).",
    )
    common.add_argument("--out", metavar="DIR", default=None, help="Write artifacts into DIR instead of stdout.")
    common.add_argument("--json-manifest", metavar="PATH", default=None, help="Write the run manifest to PATH.")

    parser = argparse.ArgumentParser(prog=NAME, description="Refined DT invariants of C^3 via plane partitions.")
    parser.add_argument("--version", action="version", version=f"{NAME}: v{__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at debug level.")
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True

    expand = subparsers.add_parser(
        CMD_EXPAND, parents=[common], help="Expand M_delta(t, q) and dump the coefficients."
    )
    expand.add_argument("--delta", type=int, default=None)
    expand.add_argument("--nmax", type=int, required=True)
    expand.add_argument("--ring", choices=RING_MODES, default=None)
    expand.add_argument("--order", type=int, default=None, help="Jet order for jet rings.")
    expand.add_argument("--half-power", action="store_true", help="Read exponents in units of q^1/2.")

    oracle = subparsers.add_parser(
        CMD_ORACLE_CHECK, parents=[common], help="Compare the expansion with brute-force enumeration."
    )
    oracle.add_argument("--n-cap", type=int, default=DEFAULT_ORACLE_N_CAP)
    oracle.add_argument("--deltas", type=int, nargs="+", default=list(DEFAULT_DELTAS))

    moments = subparsers.add_parser(
        CMD_MOMENTS, parents=[common], help="Normalized moments against the Gaussian limit."
    )
    moments.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    moments.add_argument("--n-list", type=int, nargs="+", required=True)
    moments.add_argument("--mode", choices=(SOURCE_JET, SOURCE_LAURENT, SOURCE_ORACLE), default=None)
    moments.add_argument("--order", type=int, default=None)
    moments.add_argument("--delta", type=int, default=None)
    moments.add_argument(
        "--distribution", action="store_true", help="Also write exact distribution tables with KS distances."
    )

    asymptotics = subparsers.add_parser(
        CMD_ASYMPTOTICS, parents=[common], help="Exact log p_n against Wright's formula."
    )
    asymptotics.add_argument("--n-list", type=int, nargs="+", required=True)

    sample = subparsers.add_parser(
        CMD_SAMPLE, parents=[common], help="Rejection-sample the statistic at a target size."
    )
    sample.add_argument("--config", metavar="JSON", default=None, help="Sampler parameters as a JSON object.")
    sample.add_argument("--n", type=int, default=None)
    sample.add_argument("--radius-N", dest="radius_N", type=float, default=None)
    sample.add_argument("--m-max", type=int, default=None)
    sample.add_argument("--window", type=int, default=None)
    sample.add_argument("--target-accepted", type=int, default=None)
    sample.add_argument("--attempt-budget", type=int, default=None)
    sample.add_argument("--batch-size", type=int, default=None)

    subparsers.add_parser(CMD_CONSTANTS, parents=[common], help="Dump the special constants as JSON.")
    return parser


def _emit(args: argparse.Namespace, result: CommandResult, wall_time: float) -> None:
    """Print or write the artifacts and the manifest."""
    checksums: dict[str, str] = {}
    if args.out:
        out = Path(args.out)
        main_name = f"{args.command}{result.suffix}"
        checksums[main_name] = write_artifact(out / main_name, result.text)
        for name, text in sorted(result.extras.items()):
            extra_name = f"{args.command}.{name}"
            checksums[extra_name] = write_artifact(out / extra_name, text)
    else:
        sys.stdout.write(result.text)
        for name, text in sorted(result.extras.items()):
            sys.stdout.write(f"# --- {name}\n{text}")

    manifest_path = Path(args.json_manifest) if args.json_manifest else None
    if manifest_path is None and args.out:
        manifest_path = Path(args.out) / f"{args.command}.manifest.json"
    if manifest_path is not None:
        RunManifest(
            subcommand=args.command,
            parameters=result.parameters,
            version=__version__,
            wall_time=round(wall_time, 6),
            checksums=checksums,
        ).write(manifest_path)


def main(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    start = time.perf_counter()
    try:
        result = COMMANDS[args.command](args)
    except (vol.Invalid, PmfUnavailableError) as err:
        _LOGGER.error("Invalid parameters: %s", err)
        return EXIT_INVALID_FLAGS
    except (CapViolationError, OverflowError) as err:
        _LOGGER.error("Size cap exceeded: %s", err)
        return EXIT_CAP_VIOLATION
    except AcceptanceCollapseError as err:
        _LOGGER.error("%s", err)
        return EXIT_ACCEPTANCE_COLLAPSE

    _emit(args, result, time.perf_counter() - start)
    return result.exit_code


def main_entry() -> None:
    """Console-script wrapper."""
    sys.exit(main())
