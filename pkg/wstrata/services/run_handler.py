# wstrata/services/run_handler.py

import argparse
import json
import logging
import os
import sys
from typing import Dict, List, Optional, Tuple

import numpy as np

from wstrata.config.loader import load_curve, preset_names
from wstrata.config.run import RunConfig
from wstrata.curve import CyclicCurveSpec, differential_data
from wstrata.exceptions import ConfigError, PeriodError, WStrataError
from wstrata.hooks import pipeline_stages
from wstrata.periods_abel import PeriodData, period_matrices
from wstrata.services.managers.periods import PeriodCacheManager
from wstrata.services.pipeline import PipeLine
from wstrata.utils import setup_logging

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wstrata",
        description="Semigroups, canonical bases, periods and Jacobi inversion checks for Weierstrass curves.",
    )
    parser.add_argument("--spec", required=True,
                        help=f"curve TOML file or preset:NAME ({', '.join(preset_names())})")
    parser.add_argument("--stages", help=f"comma separated subset of {','.join(pipeline_stages)}")
    parser.add_argument("--seed", type=int, help="random seed (default 0)")
    parser.add_argument("--eps", type=float, help="theta truncation error")
    parser.add_argument("--report", help="write line-delimited JSON records here")
    parser.add_argument("--periods-cache", dest="periods_cache", help="period cache file, read if present")
    parser.add_argument("--samples", type=int, help="random configurations per check")
    parser.add_argument("--extended", action="store_true", help="also run the extended stages")
    parser.add_argument("--verbose", action="store_true")
    return parser


def format_tables(result: Dict[str, object]) -> str:
    lines = []
    for table in result["tables"]:
        rows = [[str(c) for c in row] for row in [table["header"]] + table["rows"]]
        widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
        lines.append(table["title"])
        for n, row in enumerate(rows):
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
            if n == 0:
                lines.append("  ".join("-" * w for w in widths))
        lines.append("")
    for failure in result["failures"]:
        lines.append(f"FAILED {failure['stage']}: {failure['error']}: {failure['message']}")
    lines.append(f"{result['curve']}: {'ok' if result['passed'] else 'FAILED'}")
    return "\n".join(lines)


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def report_lines(result: Dict[str, object]) -> List[str]:
    rows = list(result["records"]) + [{"curve": result["curve"], "failure": f} for f in result["failures"]]
    return [json.dumps(row, sort_keys=True, default=_plain) for row in rows]


def run(config: RunConfig) -> Tuple[int, Dict[str, object]]:
    """Run the configured stages; exit status 0 iff every gated check passed."""
    spec, _ = load_curve(config.spec)
    result = PipeLine().process(spec, config)
    for line in result["logs"]:
        logger.info(line)

    if config.report:
        with open(config.report, "w", encoding="utf-8") as f:
            f.write("\n".join(report_lines(result)) + "\n")
    return (0 if result["passed"] else 1), result


def cache_periods(config: RunConfig) -> PeriodData:
    """Compute the periods of the configured curve and write them to the cache."""
    spec, _ = load_curve(config.spec)
    if not isinstance(spec, CyclicCurveSpec):
        raise PeriodError("periods are computed for cyclic covers only")
    periods = period_matrices(spec, differential_data(spec), settings=config.settings)
    PeriodCacheManager().save(periods, config.periods_cache)
    return periods


def load_periods(path: str, spec: Optional[CyclicCurveSpec] = None, genus: Optional[int] = None) -> PeriodData:
    return PeriodCacheManager().load(path, spec=spec, genus=genus)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    if os.environ.get("WSTRATA_EXTENDED") == "1":
        args.extended = True
    try:
        _, run_table = load_curve(args.spec)
        config = RunConfig.from_args(args, run_table)
        status, result = run(config)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except WStrataError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1

    print(format_tables(result))
    if not config.report:
        for line in report_lines(result):
            print(line)
    return status


if __name__ == "__main__":
    sys.exit(main())
