import sys
import os
import argparse

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.config_manager import ConfigManager
from src.controller import SUBCOMMAND_CATEGORY, Controller
from src.errors import ConfigError, HeavenMorphError
from src.logger import Logger
from src.report import emit

REPORT_DIR_ENV = "HEAVENMORPH_REPORT_DIR"

DEFAULT_SUITES = {
    "verify-metric": "metrics-basic",
    "verify-weyl": "weyl-basic",
    "surface-pipeline": "surface-model",
    "calderbank": "hspace-flat",
    "run": "full",
}


def parse_tolerances(values):
    """``--tol 1e-5`` applies to every check, ``--tol name=1e-5`` to one check."""
    overrides = {}
    for value in values or []:
        name, sep, number = value.rpartition("=")
        try:
            overrides[name if sep else "*"] = float(number)
        except ValueError:
            raise ConfigError(f"--tol: cannot read '{value}'") from None
    return overrides


def report_path(report, suite_name, seed, config):
    """Resolves the report file; a bare file name goes to the report directory."""
    if report is None:
        report = f"{suite_name}-{seed}.json"
    if os.path.dirname(report):
        return report
    directory = os.environ.get(REPORT_DIR_ENV) or config.setting("report_dir", default="reports")
    return os.path.join(directory, report)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="heavenmorph",
        description="Builds harmonic morphisms, twistor surfaces and H-space metrics and verifies them numerically.")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in SUBCOMMAND_CATEGORY:
        sub = subparsers.add_parser(command, help=f"run the {command} checks of a suite")
        source = sub.add_mutually_exclusive_group()
        source.add_argument("--config", help="path of a suite document (YAML)")
        source.add_argument("--suite", help=f"built-in suite name (default: {DEFAULT_SUITES[command]})")
        sub.add_argument("--seed", type=int, default=0, help="sampling seed (default: 0)")
        sub.add_argument("--samples", type=int, default=None, help="samples per check, overriding the suite")
        sub.add_argument("--tol", action="append", metavar="[NAME=]TOL",
                         help="tolerance override, for every check or for the named one (repeatable)")
        sub.add_argument("--report", default=None, help="report file (default: <suite>-<seed>.json)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    config = ConfigManager()
    logger = Logger(config)
    try:
        if args.config:
            document = config.load_document(args.config)
            suite_name = os.path.splitext(os.path.basename(args.config))[0]
        else:
            suite_name = args.suite or DEFAULT_SUITES[args.command]
            document = config.get_suite(suite_name)
        if args.samples is not None and args.samples <= 0:
            raise ConfigError("--samples: must be positive")
        controller = Controller(config, logger)
        report = controller.run_suite(document, args.seed, parse_tolerances(args.tol), args.samples,
                                      SUBCOMMAND_CATEGORY[args.command])
        path = report_path(args.report, suite_name, args.seed, config)
        emit(report, path)
    except (HeavenMorphError, FileNotFoundError, KeyError) as e:
        logger.failure(args.command, e)
        return 2
    passed = sum(1 for c in report.checks if c.passed)
    logger.println(f"{passed}/{len(report.checks)} checks passed. Report written to {path}", "INFO")
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
