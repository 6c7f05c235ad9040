import configparser
import os
from dataclasses import dataclass, fields, replace
from typing import Dict, Optional, Tuple

import numpy as np

from ..errors import ScenarioError
from ..generators import ModelConfig
from ..phonon.kernel import BathParams
from ..rate_equation import dressed_resonance
from ..utils import (
    AXIS_ALIASES,
    DEFAULT_M_MAX,
    ENGINE_CHOICES,
    OUTPUT_FORMATS,
    OUTPUT_SETS,
    SCENARIO_SECTIONS,
)

MODEL_KEYS = tuple(f.name for f in fields(ModelConfig) if f.name != "bath")
BATH_KEYS = tuple(f.name for f in fields(BathParams)) + ("calibrate",)
SWEEP_KEYS = ("axis", "values", "start", "stop", "num", "engine", "track_resonance", "converge_tolerance")
OUTPUT_KEYS = ("outputs", "format", "m_max", "negative_rate_tol")
SECTION_KEYS = dict(zip(SCENARIO_SECTIONS, (MODEL_KEYS, BATH_KEYS, SWEEP_KEYS, OUTPUT_KEYS)))


def validate_grid(grid):
    """
    Validate a sweep grid.

    Raises:
    - ValueError: If the grid is empty, not finite or not strictly monotone.
    """
    if len(grid) == 0:
        raise ValueError("Sweep grid must not be empty.")
    values = np.asarray(grid, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"Sweep grid must be finite, but got {list(grid)}.")
    steps = np.diff(values)
    if len(steps) and not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError(f"Sweep grid must be strictly monotone, but got {list(grid)}.")


def axis_fields(axis: str, pump_mode: str) -> Tuple[str, ...]:
    """ModelConfig fields set by a sweep axis; "temperature" addresses the bath."""
    if axis == "temperature":
        return ("temperature",)
    if axis == "delta" and pump_mode == "coherent":
        return AXIS_ALIASES["delta_p"]
    if axis in AXIS_ALIASES:
        return AXIS_ALIASES[axis]
    if axis in MODEL_KEYS and axis not in ("pump_mode", "n_max", "phonons_enabled"):
        return (axis,)
    raise ValueError(f"Unknown sweep axis {axis!r}.")


@dataclass(frozen=True)
class SweepSpec:
    """
    One scenario: a base model, the axis swept and what to compute at each point.

    Args:
        base (ModelConfig): Model at the start of the sweep; the axis fields are overwritten per point.
        axis (str): A ModelConfig field, "temperature", or a symmetric alias ("eta", "delta").
        grid (tuple): Strictly monotone axis values.
        outputs (tuple): Subset of OUTPUT_SETS.
        engine (str): "full", "sme" or "both".
        track_resonance (bool): Set delta_cp = -sqrt(delta1p^2 + 4 eta1^2) at every point.
        calibrate (bool): Calibrate g1_abs so that <B>(5 K) = 0.9 before the sweep.
        converge_tolerance (float, optional): When set, each point raises n_max until <n> converges.
        output_format (str): "csv" or "json".
        m_max (int): Multi-photon order kept by the rate equation.
        negative_rate_tol (float, optional): When set, the reduction clamps negative rates above
            -negative_rate_tol and fails points with more negative ones.
    """
    base: ModelConfig
    axis: str
    grid: Tuple[float, ...]
    outputs: Tuple[str, ...] = OUTPUT_SETS[:3]
    engine: str = "sme"
    track_resonance: bool = False
    calibrate: bool = False
    converge_tolerance: Optional[float] = None
    output_format: str = "csv"
    m_max: int = DEFAULT_M_MAX
    negative_rate_tol: Optional[float] = None

    def __post_init__(self):
        validate_grid(self.grid)
        axis_fields(self.axis, self.base.pump_mode)
        if self.engine not in ENGINE_CHOICES:
            raise ValueError(f"engine must be one of {ENGINE_CHOICES}, but got {self.engine!r}.")
        unknown = [o for o in self.outputs if o not in OUTPUT_SETS]
        if unknown:
            raise ValueError(f"Unknown outputs {unknown}; choose from {OUTPUT_SETS}.")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"format must be one of {OUTPUT_FORMATS}, but got {self.output_format!r}.")
        if self.track_resonance and not self.base.coherent:
            raise ValueError("track_resonance needs pump_mode = coherent.")
        if not 1 <= self.m_max <= self.base.n_max:
            raise ValueError(f"m_max must lie in 1..{self.base.n_max}, but got {self.m_max}.")
        if self.converge_tolerance is not None and self.converge_tolerance <= 0:
            raise ValueError(f"converge_tolerance must be positive, but got {self.converge_tolerance}.")
        if self.negative_rate_tol is not None and not self.negative_rate_tol >= 0:
            raise ValueError(f"negative_rate_tol must be non-negative, but got {self.negative_rate_tol}.")

    @property
    def engines(self) -> Tuple[str, ...]:
        return ("full", "sme") if self.engine == "both" else (self.engine,)

    def point_config(self, value: float, bath: Optional[BathParams] = None) -> ModelConfig:
        """The model at one grid value, on the given (possibly calibrated) bath."""
        bath = self.base.bath if bath is None else bath
        changes: Dict[str, object] = {}
        for name in axis_fields(self.axis, self.base.pump_mode):
            if name == "temperature":
                bath = replace(bath, temperature=float(value))
            else:
                changes[name] = float(value)
        config = replace(self.base, bath=bath, **changes)
        if self.track_resonance:
            config = replace(config, delta_cp=-dressed_resonance(config.delta1p, config.eta1))
        return config


def _read(path: str) -> configparser.ConfigParser:
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Scenario file {path} not found")
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as f:
            parser.read_file(f)
    except configparser.Error as e:
        raise ScenarioError(f"Cannot parse scenario file {path}: {e}") from e
    return parser


def _check_keys(parser: configparser.ConfigParser, path: str):
    for section in parser.sections():
        if section not in SECTION_KEYS:
            raise ScenarioError(f"Unknown section [{section}] in {path}; expected {SCENARIO_SECTIONS}.")
        unknown = [key for key in parser[section] if key not in SECTION_KEYS[section]]
        if unknown:
            raise ScenarioError(f"Unknown keys {unknown} in [{section}] of {path}.")
    if not parser.has_section("sweep"):
        raise ScenarioError(f"Scenario file {path} has no [sweep] section.")


def _floats(text: str):
    return tuple(float(v) for v in text.replace("\n", ",").split(",") if v.strip())


def _words(text: str):
    return tuple(v.strip() for v in text.replace("\n", ",").split(",") if v.strip())


def _model_values(section) -> dict:
    values = {}
    for key in section:
        if key == "pump_mode":
            values[key] = section[key].strip()
        elif key == "n_max":
            values[key] = section.getint(key)
        elif key == "phonons_enabled":
            values[key] = section.getboolean(key)
        else:
            values[key] = section.getfloat(key)
    return values


def _grid(section) -> Tuple[float, ...]:
    if "values" in section:
        if any(key in section for key in ("start", "stop", "num")):
            raise ScenarioError("[sweep] takes either values or start/stop/num, not both.")
        return _floats(section["values"])
    missing = [key for key in ("start", "stop", "num") if key not in section]
    if missing:
        raise ScenarioError(f"[sweep] needs values or start/stop/num; missing {missing}.")
    grid = np.linspace(section.getfloat("start"), section.getfloat("stop"), section.getint("num"))
    return tuple(float(v) for v in grid)


def load_scenario(path: str) -> SweepSpec:
    """
    Read an INI scenario file with sections [model], [bath], [sweep] and [output].

    Parameters:
    - path: Scenario file path.

    Returns:
    - The SweepSpec it describes.

    Raises:
    - FileNotFoundError: If the file does not exist.
    - ScenarioError: If a section, key or value is invalid.
    """
    parser = _read(path)
    _check_keys(parser, path)
    try:
        bath_section = parser["bath"] if parser.has_section("bath") else {}
        bath_values = {key: float(bath_section[key]) for key in bath_section if key != "calibrate"}
        calibrate = parser.getboolean("bath", "calibrate", fallback=False)
        bath = BathParams(**bath_values)

        model_values = _model_values(parser["model"]) if parser.has_section("model") else {}
        base = ModelConfig(bath=bath, **model_values)

        sweep = parser["sweep"]
        if "axis" not in sweep:
            raise ScenarioError(f"[sweep] of {path} has no axis.")
        output = parser["output"] if parser.has_section("output") else {}
        tolerance = sweep.get("converge_tolerance")
        return SweepSpec(
            base=base,
            axis=sweep["axis"].strip(),
            grid=_grid(sweep),
            outputs=_words(output["outputs"]) if "outputs" in output else OUTPUT_SETS[:3],
            engine=sweep.get("engine", "sme").strip(),
            track_resonance=parser.getboolean("sweep", "track_resonance", fallback=False),
            calibrate=calibrate,
            converge_tolerance=float(tolerance) if tolerance is not None else None,
            output_format=output["format"].strip() if "format" in output else "csv",
            m_max=int(output["m_max"]) if "m_max" in output else DEFAULT_M_MAX,
            negative_rate_tol=float(output["negative_rate_tol"]) if "negative_rate_tol" in output
            else None,
        )
    except ScenarioError:
        raise
    except (ValueError, TypeError) as e:
        raise ScenarioError(f"Invalid scenario {path}: {e}") from e
