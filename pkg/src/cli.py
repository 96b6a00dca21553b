"""
Command-line interface for the architecture-search engine.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from .config.config_manager import ConfigManager, ExperimentConfig, config_hash
from .framework import SUMMARY_NAME, ExperimentFramework, summarize_runs
from .utils.logging_utils import log_error, setup_logger

EXIT_OK = 0
EXIT_INVALID_CONFIG = 1
EXIT_RUNTIME = 2


def _load_config(args, manager: ConfigManager) -> ExperimentConfig:
    config = manager.load_from_file(args.config)
    if args.seed_override is not None:
        config = config.model_copy(update={"seeds": [args.seed_override]})
    return config


def _output_dir(args, config: Optional[ExperimentConfig]) -> Path:
    if args.out:
        return Path(args.out)
    if config is not None:
        return Path(config.output_dir)
    raise ValueError("report needs --out or --config")


def run_command(args, manager: ConfigManager, logger: logging.Logger, resume: bool = False) -> int:
    """Run (or resume) an experiment."""
    # Load the configuration
    config = _load_config(args, manager)

    # Create a framework instance
    framework = ExperimentFramework(config, _output_dir(args, config), workers=manager.settings.workers)
    logger.info(f"{'Resuming' if resume else 'Running'} {config.task} for seeds {config.seeds}")

    # Run every seed
    summaries = framework.run(resume=resume)
    for summary in summaries:
        logger.info(f"Seed summary: {summary}")
    print(f"Finished {config.task}; outputs in {framework.output_dir}")
    return EXIT_OK


def report_command(args, manager: ConfigManager, logger: logging.Logger) -> int:
    """Aggregate episode logs into summary.csv."""
    config = _load_config(args, manager) if args.config else None
    output_dir = _output_dir(args, config)

    # Aggregate the logs
    frame = summarize_runs(output_dir)
    frame.to_csv(output_dir / SUMMARY_NAME, index=False)
    logger.info(f"Wrote {output_dir / SUMMARY_NAME}")
    print(frame.to_string(index=False))
    return EXIT_OK


def validate_command(args, manager: ConfigManager, logger: logging.Logger) -> int:
    """Check a config without running it."""
    config = _load_config(args, manager)
    logger.info(f"Config {args.config} is valid ({config.task}, hash {config_hash(config)[:12]})")
    print(f"OK: {args.config}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="RL quantum architecture search engine")
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    # Options shared by every command
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", help="Path to an experiment config (JSON)")
    common.add_argument("--seed-override", type=int, help="Run a single seed instead of the config's list")
    common.add_argument("--out", "-o", help="Output directory; the config's output_dir when omitted")
    common.add_argument("--quiet", "-q", action="store_true", help="Only warnings and errors on the console")


    # Commands
    subparsers.add_parser("run", parents=[common], help="Run an experiment")
    subparsers.add_parser("resume", parents=[common], help="Continue an experiment from its checkpoints")
    subparsers.add_parser("report", parents=[common], help="Summarize episode logs")
    subparsers.add_parser("validate-config", parents=[common], help="Validate a config without running")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the CLI."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_INVALID_CONFIG

    # Load environment settings
    manager = ConfigManager()

    # Set up logging
    level = "WARNING" if args.quiet else manager.settings.log_level
    logger = setup_logger(
        name="src", level=level, log_file=manager.settings.log_file, file_level=manager.settings.log_level
    )

    if args.command != "report" and not args.config:
        print("error: --config is required", file=sys.stderr)
        return EXIT_INVALID_CONFIG

    # Dispatch
    try:
        if args.command == "run":
            return run_command(args, manager, logger)
        if args.command == "resume":
            return run_command(args, manager, logger, resume=True)
        if args.command == "report":
            return report_command(args, manager, logger)
        return validate_command(args, manager, logger)
    except (ValidationError, FileNotFoundError) as e:
        log_error(logger, type(e).__name__, str(e), {"command": args.command, "config": args.config})
        print(f"error: invalid configuration: {e}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except Exception as e:
        log_error(logger, type(e).__name__, str(e), {"command": args.command, "config": args.config})
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
