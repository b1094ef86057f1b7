import dataclasses
import logging
import sys
import time
from argparse import SUPPRESS, ArgumentParser, ArgumentTypeError, Namespace
from pathlib import Path

from photon_scintillation import __version__
from photon_scintillation.api.exceptions import ConfigurationError, DegenerateEstimateError, SimulationException

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

EXIT_CONFIG_ERROR = 2
EXIT_VALIDATION_FAILURE = 3
EXIT_DEGENERATE = 4


def _worker_count(value: str) -> int:
    count = int(value)
    if count < 0:
        raise ArgumentTypeError(f"worker count {value} must not be negative")
    return count


def _common_arguments() -> ArgumentParser:
    parser = ArgumentParser(add_help=False)
    parser.add_argument(
        "--seed",
        type=int,
        help="Master seed, overrides experiment.master_seed",
    )
    parser.add_argument(
        "--workers",
        default=1,
        type=_worker_count,
        help="Number of parallel worker processes, 0 for one per CPU. Results do not depend on it",
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Log debug messages",
    )
    return parser


def _experiment_arguments() -> ArgumentParser:
    parser = ArgumentParser(add_help=False)
    parser.add_argument(
        "--config",
        type=str,
        required=True,
        help="Path to the experiment config file or the manifest of a previous run",
    )
    parser.add_argument(
        "--out",
        type=str,
        help="Path of the CSV output, defaults to <command>.csv. The manifest is written to <out>.manifest.json",
    )
    parser.add_argument(
        "--realizations",
        type=int,
        help="Number of realizations, overrides experiment.realizations",
    )
    return parser


def _parse_args(args) -> Namespace:
    parser = ArgumentParser("photon-scintillation")
    parser.add_argument(
        "--version",
        action="version",
        version=__version__
    )
    commands = parser.add_subparsers(dest="command", required=True)
    common = [_common_arguments(), _experiment_arguments()]
    commands.add_parser("beam", parents=common, help="Beam spread versus distance")
    scint = commands.add_parser("scint", parents=common, help="Scintillation index versus turbulence and coherence")
    scint.add_argument(
        "--dump-screens",
        type=str,
        help="Folder to dump the screens of realization 0 to",
    )
    commands.add_parser("count", parents=common, help="Photocount statistics of Fock and Poisson sources")
    validate = commands.add_parser("validate", parents=[_common_arguments()], help="Run the oracle checks")
    validate.add_argument("--tolerance-scale", type=float, default=1.0, help=SUPPRESS)
    return parser.parse_args(args)


def _fail(code: int, message: str):
    print(message, file=sys.stderr)
    raise SystemExit(code)


def _apply_overrides(config, args: Namespace):
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.realizations is not None:
        overrides["realizations"] = args.realizations
    if not overrides:
        return config

    from pydantic import ValidationError
    try:
        return dataclasses.replace(config, **overrides)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid command line override: {e}") from e


def _run_validate(args: Namespace) -> None:
    from photon_scintillation.cli.validate import run_validation

    suite = run_validation(
        seed=args.seed if args.seed is not None else 0,
        worker_count=args.workers,
        tolerance_scale=args.tolerance_scale,
    )
    for result in suite.results:
        print(result.report_line())
    failed = sum(1 for result in suite.results if not result.passed)
    print(f"> {len(suite.results) - failed}/{len(suite.results)} checks passed")
    if failed:
        raise SystemExit(EXIT_VALIDATION_FAILURE)


def _run_experiment(args: Namespace) -> None:
    import yaml

    from photon_scintillation.cli import commands
    from photon_scintillation.cli.config_file import experiment_to_sections, load_experiment_config
    from photon_scintillation.cli.output import RunManifest, write_csv, write_manifest

    try:
        config = _apply_overrides(load_experiment_config(Path(args.config)), args)
    except (ConfigurationError, yaml.YAMLError, OSError, ValueError) as e:
        _fail(EXIT_CONFIG_ERROR, f"Failed to load experiment config from '{args.config}': {e}")

    out = Path(args.out or f"{args.command}.csv")
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise SystemExit(f"Failed to create output folder at '{out.parent}': {e}")

    started = time.perf_counter()
    try:
        if args.command == "beam":
            outcome = commands.cmd_beam(config, args.workers)
        elif args.command == "scint":
            dump = Path(args.dump_screens) if args.dump_screens else None
            outcome = commands.cmd_scint(config, args.workers, dump)
        else:
            outcome = commands.cmd_count(config, args.workers)
    except ConfigurationError as e:
        _fail(EXIT_CONFIG_ERROR, f"Invalid experiment for {args.command}: {e}")
    except DegenerateEstimateError as e:
        _fail(EXIT_DEGENERATE, f"Degenerate estimate in {args.command}: {e}")
    except SimulationException as e:
        raise SystemExit(f"Error occurred while running {args.command}: {e}")

    write_csv(out, outcome.schema, outcome.rows)
    manifest = write_manifest(out, RunManifest(
        command=args.command,
        tool_version=__version__,
        master_seed=config.master_seed,
        config=experiment_to_sections(config),
        csv_schema=outcome.schema.identifier,
        columns=list(outcome.schema.columns),
        workers=args.workers,
        runtime_seconds=time.perf_counter() - started,
        warnings=outcome.warnings,
        extras={**outcome.extras, "degenerate_share": outcome.degenerate_share},
    ))
    print(f"> {out}")
    print(f"> {manifest}")

    if outcome.degenerate_share > config.degenerate_threshold:
        _fail(
            EXIT_DEGENERATE,
            f"{outcome.degenerate_share:.1%} of realizations are degenerate, "
            f"threshold is {config.degenerate_threshold:.1%}"
        )


def main(argv=None) -> None:
    try:
        import yaml
    except ImportError:
        raise SystemExit("PyYAML not installed, can not use CLI.")

    if argv is None:
        argv = sys.argv[1:] if sys.argv else []

    args = _parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    if args.command == "validate":
        _run_validate(args)
    else:
        _run_experiment(args)
