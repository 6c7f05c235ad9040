import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np
from memory_profiler import memory_usage
from tqdm import tqdm

from ..errors import QdLaserError
from ..generators import ModelConfig, build_generator
from ..phonon.kernel import BathParams, PhononKernel, calibrate_g1_abs
from ..rate_equation import PhotonRateModel, excess_emission, reduce
from ..steady_state import converge_n_max, solve_steady
from ..utils import (
    COLLECTIVE_LABELS,
    ENGINES,
    FLAG_B_ZERO_TEMPERATURE,
    FLAG_CALIBRATED,
    FLAG_ERROR,
    FLAG_G1_ABS,
    FLAG_NEGATIVE_SHARE,
    FLAG_OVERFLOW,
    FLAG_SEPARATOR,
    FLOAT_TEMPLATE,
    OVERFLOW_WARN_FRACTION,
)
from .scenario import SweepSpec

logging.basicConfig(
    format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
    datefmt="%m/%d/%Y %H:%M:%S",
    level=logging.INFO,
)
logger = logging.getLogger(__name__)

EXCESS_COLUMNS = ("spee", "tpee", "thpee", "fpee")


@dataclass(frozen=True)
class ResultRow:
    """One grid point computed with one engine. Failed points carry NaNs and an error flag."""
    index: int
    axis: float
    engine: str
    populations: Dict[str, float]
    mean_n: float
    excess: Dict[int, float] = field(default_factory=dict)
    mean_n_rate_eq: float = float("nan")
    overflow_excess: float = float("nan")
    residual: float = float("nan")
    n_max: int = 0
    B: float = float("nan")
    flags: Tuple[str, ...] = ()

    @property
    def failed(self) -> bool:
        return any(flag.startswith(FLAG_ERROR.format(name="")) for flag in self.flags)

    def as_record(self) -> Dict[str, object]:
        record = {"axis": self.axis, "engine": self.engine}
        for label in COLLECTIVE_LABELS:
            record[f"p_{label}"] = self.populations.get(label, float("nan"))
        record["mean_n"] = self.mean_n
        for k, name in enumerate(EXCESS_COLUMNS, start=1):
            record[name] = self.excess.get(k, float("nan"))
        record.update(residual=self.residual, n_max=self.n_max, B=self.B, flags=FLAG_SEPARATOR.join(self.flags))
        return record


@dataclass(frozen=True)
class PreparedSweep:
    """Per-point configurations on a resolved bath, with one kernel per distinct bath."""
    spec: SweepSpec
    configs: Tuple[ModelConfig, ...]
    kernels: Dict[BathParams, object]
    flags: Tuple[str, ...]


def resolve_bath(spec: SweepSpec) -> Tuple[BathParams, Tuple[str, ...]]:
    bath = spec.base.bath
    flags = []
    if spec.calibrate:
        bath = replace(bath, g1_abs=calibrate_g1_abs(bath))
        flags.append(FLAG_CALIBRATED)
    flags.insert(0, FLAG_G1_ABS.format(value=FLOAT_TEMPLATE.format(bath.g1_abs)))
    return bath, tuple(flags)


def prepare(spec: SweepSpec) -> PreparedSweep:
    """
    Resolve the bath, build every grid point's configuration and the kernels they share.
    A kernel that cannot be built is stored as its exception and fails only its own points.
    """
    bath, flags = resolve_bath(spec)
    configs = tuple(spec.point_config(value, bath) for value in spec.grid)
    kernels: Dict[BathParams, object] = {}
    for config in configs:
        if config.bath in kernels:
            continue
        try:
            kernels[config.bath] = PhononKernel.from_bath(config.bath)
        except QdLaserError as e:
            logger.warning(f"Kernel at T={config.bath.temperature} K failed: {e}")
            kernels[config.bath] = e
    return PreparedSweep(spec, configs, kernels, flags)


def _failed_row(index: int, value: float, engine: str, flags: Tuple[str, ...], error: Exception) -> ResultRow:
    nan = float("nan")
    return ResultRow(
        index=index, axis=value, engine=engine, populations={label: nan for label in COLLECTIVE_LABELS},
        mean_n=nan, flags=flags + (FLAG_ERROR.format(name=type(error).__name__),))


def _reduction_flags(model: PhotonRateModel) -> Tuple[str, ...]:
    flags = []
    if model.negative_share > 0:
        flags.append(FLAG_NEGATIVE_SHARE.format(value=f"{model.negative_share:.3g}"))
    overflow = model.overflow_fraction()
    if abs(overflow) > OVERFLOW_WARN_FRACTION:
        flags.append(FLAG_OVERFLOW.format(value=f"{overflow:.3g}"))
    return tuple(flags)


def evaluate_point(spec: SweepSpec, index: int, config: ModelConfig, kernel, engine: str,
                   flags: Tuple[str, ...] = ()) -> ResultRow:
    """Steady state, and for the SME the excess-emission split, at one grid point."""
    value = spec.grid[index]
    if isinstance(kernel, Exception):
        return _failed_row(index, value, engine, flags, kernel)
    if config.phonons_enabled and config.bath.temperature == 0 and kernel.has_phonons:
        flags = flags + (FLAG_B_ZERO_TEMPERATURE,)
    start = time.time()
    try:
        if spec.converge_tolerance is not None:
            n_max, _ = converge_n_max(config, kernel, spec.converge_tolerance, engine)
            config = config.with_n_max(n_max)
        generator = build_generator(config, kernel, engine)
        state = solve_steady(generator)
        flags = flags + tuple(f for f in generator.flags if f not in flags)
        excess, mean_n_rate_eq, overflow_excess = {}, float("nan"), float("nan")
        wants_rates = "excess" in spec.outputs or "rateeq_sme_compare" in spec.outputs
        if engine == "sme" and wants_rates:
            model = reduce(generator, m_max=spec.m_max, negative_rate_tol=spec.negative_rate_tol)
            report = excess_emission(model, sme_state=state)
            excess, mean_n_rate_eq = report.excess, report.mean_n_rate_eq
            overflow_excess = report.overflow_excess
            flags = flags + _reduction_flags(model)
    except QdLaserError as e:
        logger.warning(f"Point {spec.axis}={value} ({engine}) failed: {e}")
        return _failed_row(index, value, engine, flags, e)
    logger.debug(f"Point {spec.axis}={value} ({engine}) took {time.time() - start:.2f}s.")
    return ResultRow(
        index=index,
        axis=value,
        engine=engine,
        populations=state.populations,
        mean_n=state.mean_n,
        excess=excess,
        mean_n_rate_eq=mean_n_rate_eq,
        overflow_excess=overflow_excess,
        residual=state.residual,
        n_max=config.n_max,
        B=kernel.B if config.phonons_enabled else 1.0,
        flags=flags,
    )


def run_sweep(spec: SweepSpec, workers: Optional[int] = None, progress: bool = True) -> List[ResultRow]:
    """
    Evaluate every grid point with every requested engine.

    Points run concurrently on a thread pool sharing one immutable kernel per bath; rows
    come back sorted by (grid index, engine) so identical specs give identical output.

    Args:
        spec (SweepSpec): The scenario.
        workers (int, optional): Thread count, defaults to the number of CPUs.
        progress (bool): Show a tqdm progress bar.

    Returns:
        list of ResultRow: Empty when spec.outputs is empty.
    """
    if not spec.outputs:
        logger.info("No outputs requested, nothing to compute.")
        return []
    prepared = prepare(spec)
    workers = workers or os.cpu_count() or 1
    tasks = [(index, engine) for index in range(len(spec.grid)) for engine in spec.engines]
    logger.info(f"Sweeping {spec.axis} over {len(spec.grid)} points with engines {spec.engines} "
                f"on {workers} workers.")

    rows = []
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [
            executor.submit(evaluate_point, spec, index, prepared.configs[index],
                            prepared.kernels[prepared.configs[index].bath], engine, prepared.flags)
            for index, engine in tasks
        ]
        for future in tqdm(as_completed(futures), total=len(futures), desc="Sweep", leave=False,
                           disable=not progress):
            rows.append(future.result())
    rows.sort(key=lambda row: (row.index, ENGINES.index(row.engine)))

    failures = sum(row.failed for row in rows)
    if failures:
        logger.warning(f"{failures} of {len(rows)} points failed.")
    logger.info(f"Sweep finished: {len(rows)} rows, resident memory {memory_usage()[0]:.1f} MiB.")
    return rows


def compare_engines(spec: SweepSpec, rows: Optional[List[ResultRow]] = None,
                    workers: Optional[int] = None) -> Tuple[List[Dict[str, object]], Dict[str, float]]:
    """
    Per-point differences between the full polaron master equation and the SME, together
    with the rate-equation <n> against the SME <n>.

    Returns:
        tuple: (records keyed by COMPARE_COLUMNS, summary of the largest differences).
    """
    if spec.engine != "both":
        spec = replace(spec, engine="both")
    if rows is None:
        outputs = tuple(dict.fromkeys(spec.outputs + ("populations", "mean_n", "rateeq_sme_compare")))
        rows = run_sweep(replace(spec, outputs=outputs), workers)
    by_point: Dict[int, Dict[str, ResultRow]] = {}
    for row in rows:
        by_point.setdefault(row.index, {})[row.engine] = row

    records = []
    for index in sorted(by_point):
        full, sme = by_point[index].get("full"), by_point[index].get("sme")
        if full is None or sme is None:
            continue
        record: Dict[str, object] = {"axis": sme.axis}
        for label in COLLECTIVE_LABELS:
            record[f"d_p_{label}"] = abs(full.populations[label] - sme.populations[label])
        record["d_mean_n"] = abs(full.mean_n - sme.mean_n)
        record["mean_n_rate_eq"] = sme.mean_n_rate_eq
        record["overflow_excess"] = sme.overflow_excess
        record["mean_n_sme"] = sme.mean_n
        record["rel_rate_eq"] = abs(sme.mean_n_rate_eq - sme.mean_n) / abs(sme.mean_n) if sme.mean_n else float("nan")
        record["flags"] = FLAG_SEPARATOR.join(dict.fromkeys(full.flags + sme.flags))
        records.append(record)

    def _max(key: str) -> float:
        values = [r[key] for r in records if np.isfinite(r[key])]
        return float(max(values)) if values else float("nan")

    populations = [v for v in (_max(f"d_p_{label}") for label in COLLECTIVE_LABELS) if np.isfinite(v)]
    summary = {
        "max_population_difference": max(populations) if populations else float("nan"),
        "max_mean_n_difference": _max("d_mean_n"),
        "max_rel_rate_eq": _max("rel_rate_eq"),
    }
    logger.info(
        f"Engine comparison: max |dP| = {summary['max_population_difference']:.3e}, "
        f"max |d<n>| = {summary['max_mean_n_difference']:.3e}, "
        f"max rate-equation deviation = {summary['max_rel_rate_eq']:.3e}.")
    return records, summary
