from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import List, Optional

from common.errors import ExprError, RatekitError, ScenarioValidationError
from common.metrics import Metrics
from config.settings import NumericSettings
from scenarios import builtin_names, load_scenario, scenario_settings

from .commands import COMMANDS, CommandContext

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_NO_TIPPING = 4

COMMAND_HELP = {
    "validate": "check a scenario and print its limit data",
    "track": "tracking check at the scenario's fixed rate",
    "scan": "threshold instability scans with heat maps",
    "find-rc": "critical rates in the scenario's rate window",
    "classify": "critical rates plus the reversible/irreversible verdict",
    "construct-input": "build an input that tips at the scenario's r_star",
    "diagram": "critical rates over the scenario's sweep",
    "run": "the analysis the scenario selects",
}


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "scenario",
        help=f"scenario JSON file or builtin name ({', '.join(builtin_names())})",
    )
    common.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    common.add_argument("--jobs", type=_positive_int, default=1, help="concurrent sweep workers")
    common.add_argument(
        "--expect-tipping", action="store_true", help="exit 4 when no critical rate is found"
    )
    common.add_argument("--alpha", type=float, default=None, help="compactification exponent override")
    common.add_argument("--tol-r", dest="tol_r", type=float, default=None, help="critical rate tolerance")
    common.add_argument(
        "--seed-delta", dest="seed_delta_rel", type=float, default=None, help="relative manifold seed offset"
    )

    parser = argparse.ArgumentParser(
        prog="ratekit",
        description="Rate-induced tipping analyses for scenario files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=COMMAND_HELP[name])
    return parser


async def main(argv: Optional[List[str]] = None, settings: Optional[NumericSettings] = None) -> int:
    """Parse ``argv``, run the command and map failures to exit codes."""
    args = build_parser().parse_args(argv)
    flags = {
        "alpha": args.alpha,
        "tol_r": args.tol_r,
        "seed_delta_rel": args.seed_delta_rel,
        "jobs": args.jobs,
        "expect_tipping": args.expect_tipping,
    }
    overrides = {k: flags[k] for k in ("alpha", "tol_r", "seed_delta_rel")}
    metrics = Metrics()
    extra = {"scenario": args.scenario, "analysis": args.command}
    try:
        scenario = load_scenario(args.scenario)
        ctx = CommandContext(
            command=args.command,
            scenario=scenario,
            settings=scenario_settings(scenario, settings, overrides),
            out=args.out,
            jobs=args.jobs,
            flags=flags,
            metrics=metrics,
        )
        result = await COMMANDS[args.command](ctx)
    except (ScenarioValidationError, ExprError) as exc:
        logger.error("Invalid scenario: %s", exc, extra=extra)
        return EXIT_INVALID
    except RatekitError as exc:
        logger.error("Numerical failure: %s: %s", type(exc).__name__, exc, extra=extra)
        return EXIT_NUMERICAL
    finally:
        metrics.log(logger, force=True)

    if args.expect_tipping and result.tipping_found is False:
        logger.error("No tipping found", extra=extra)
        return EXIT_NO_TIPPING
    return EXIT_OK
