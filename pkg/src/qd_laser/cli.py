import argparse
import logging
import os
from dataclasses import replace
from typing import List, Optional

from memory_profiler import memory_usage

from .checks import run_checks
from .errors import ScenarioError
from .phonon.kernel import BathParams, PhononKernel, calibrate_g1_abs, franck_condon_table
from .sweep import compare_engines, emit, load_scenario, run_sweep
from .sweep.runner import resolve_bath
from .utils import COMPARE_COLUMNS, ENGINE_CHOICES, OUTPUT_FORMATS, RESULT_COLUMNS

logging.basicConfig(
    format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
    datefmt="%m/%d/%Y %H:%M:%S",
    level=logging.INFO,
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SPEC_ERROR = 1
EXIT_PARTIAL = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qd_laser", description="Two quantum dots in a cavity with exciton-phonon coupling.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_run_arguments(sub, engine=True):
        sub.add_argument("--config", type=str, required=True, help="Scenario file (INI).")
        sub.add_argument("--out", type=str, default=None, help="Output file, defaults to results/<scenario>.<fmt>.")
        sub.add_argument("--format", type=str, choices=OUTPUT_FORMATS, default=None, help="Output format.")
        sub.add_argument("--workers", type=int, default=None, help="Worker threads, defaults to the CPU count.")
        if engine:
            sub.add_argument("--engine", type=str, choices=ENGINE_CHOICES, default=None,
                             help="Master equation(s) to solve.")

    add_run_arguments(subparsers.add_parser("sweep", help="Run a parameter sweep."))
    add_run_arguments(subparsers.add_parser("compare", help="Compare the full polaron ME with the SME."),
                      engine=False)

    calibrate = subparsers.add_parser("calibrate", help="Calibrate g1_abs so that <B>(T) hits a target.")
    calibrate.add_argument("--config", type=str, default=None, help="Scenario whose [bath] is calibrated.")
    calibrate.add_argument("--temperature", type=float, default=5.0, help="Calibration temperature (K).")
    calibrate.add_argument("--target", type=float, default=0.9, help="Target <B>.")

    check = subparsers.add_parser("check", help="Run the invariant suite on a scenario's first grid point.")
    check.add_argument("--config", type=str, required=True, help="Scenario file (INI).")
    check.add_argument("--n_max", type=int, default=None, help="Photon truncation override.")
    return parser


def _output_path(args, spec, suffix: str = "") -> str:
    fmt = args.format or spec.output_format
    if args.out:
        root, _ = os.path.splitext(args.out)
        return f"{root}{suffix}.{fmt}"
    stem = os.path.splitext(os.path.basename(args.config))[0]
    return os.path.join("results", f"{stem}{suffix}.{fmt}")


def _sweep(args) -> int:
    spec = load_scenario(args.config)
    if args.engine:
        spec = replace(spec, engine=args.engine)
    fmt = args.format or spec.output_format
    rows = run_sweep(spec, args.workers)
    path = emit([row.as_record() for row in rows], _output_path(args, spec), fmt, RESULT_COLUMNS)
    logger.info(f"Wrote {len(rows)} rows to {path}.")
    if spec.engine == "both" and {"me_sme_compare", "rateeq_sme_compare"} & set(spec.outputs):
        records, _ = compare_engines(spec, rows)
        emit(records, _output_path(args, spec, ".compare"), fmt, COMPARE_COLUMNS)
    return EXIT_PARTIAL if any(row.failed for row in rows) else EXIT_OK


def _compare(args) -> int:
    spec = load_scenario(args.config)
    records, summary = compare_engines(spec, workers=args.workers)
    path = emit(records, _output_path(args, spec, ".compare"), args.format or spec.output_format, COMPARE_COLUMNS)
    logger.info(f"Wrote {len(records)} comparison rows to {path}; summary {summary}.")
    failed = len(records) < len(spec.grid) or any("error=" in str(r["flags"]) for r in records)
    return EXIT_PARTIAL if failed else EXIT_OK


def _calibrate(args) -> int:
    bath = load_scenario(args.config).base.bath if args.config else BathParams()
    g1_abs = calibrate_g1_abs(bath, args.temperature, args.target)
    print(f"g1_abs = {g1_abs:.9g} ueV")
    for temperature, value in franck_condon_table(replace(bath, g1_abs=g1_abs)).items():
        print(f"<B>({temperature:g} K) = {value:.6f}")
    return EXIT_OK


def _check(args) -> int:
    spec = load_scenario(args.config)
    bath, _ = resolve_bath(spec)
    config = spec.point_config(spec.grid[0], bath)
    if args.n_max is not None:
        config = config.with_n_max(args.n_max)
    results = run_checks(config, PhononKernel.from_bath(config.bath))
    for result in results:
        print(result)
    logger.info(f"Resident memory after checks: {memory_usage()[0]:.1f} MiB.")
    return EXIT_OK if all(result.passed for result in results) else EXIT_PARTIAL


COMMANDS = {"sweep": _sweep, "compare": _compare, "calibrate": _calibrate, "check": _check}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ScenarioError, FileNotFoundError, ValueError) as e:
        logger.error(str(e))
        return EXIT_SPEC_ERROR
