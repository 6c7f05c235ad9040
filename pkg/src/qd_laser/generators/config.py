from dataclasses import dataclass, field, replace

import numpy as np

from ..fock_algebra import HilbertLayout
from ..phonon.kernel import BathParams
from ..utils import PUMP_MODES, DEFAULT_N_MAX, DEFAULT_M_MAX

INCOHERENT_ONLY = ("delta1", "delta2")
COHERENT_ONLY = ("delta1p", "delta2p", "delta_cp")


def validate_model_config(config: "ModelConfig"):
    """
    Validate a model configuration.

    Parameters:
    - config: The configuration to check.

    Raises:
    - ValueError: If a rate is negative, kappa is not positive, n_max is too small to
      represent four-photon processes, or a detuning of the other pump mode is set.
    """
    if config.pump_mode not in PUMP_MODES:
        raise ValueError(f"pump_mode must be one of {PUMP_MODES}, but got {config.pump_mode!r}.")
    if not config.kappa > 0:
        raise ValueError(f"kappa must be positive, but got {config.kappa}.")
    for name in ("gamma1", "gamma2", "gamma1p", "gamma2p", "eta1", "eta2"):
        value = getattr(config, name)
        if not np.isfinite(value) or value < 0:
            raise ValueError(f"{name} must be finite and non-negative, but got {value}.")
    for name in ("g1", "g2", "delta1", "delta2", "delta1p", "delta2p", "delta_cp"):
        if not np.isfinite(getattr(config, name)):
            raise ValueError(f"{name} must be finite, but got {getattr(config, name)}.")
    if config.n_max < DEFAULT_M_MAX:
        raise ValueError(f"n_max must be at least {DEFAULT_M_MAX}, but got {config.n_max}.")
    unread = COHERENT_ONLY if config.pump_mode == "incoherent" else INCOHERENT_ONLY
    stray = [name for name in unread if getattr(config, name) != 0]
    if stray:
        raise ValueError(f"Detunings {stray} are not used with pump_mode={config.pump_mode!r} and must be zero.")


@dataclass(frozen=True)
class ModelConfig:
    """
    Two quantum dots in a single-mode cavity, all rates and detunings in units of g1.

    Incoherent pumping reads delta1, delta2 (QD-cavity detunings) and pumps with
    (eta_i / 2) L[sigma_i^+]. Coherent pumping works in the frame of the pump laser,
    reads delta1p, delta2p, delta_cp and drives the dots with amplitude eta_i.
    """
    pump_mode: str = "incoherent"
    g1: float = 1.0
    g2: float = 1.0
    kappa: float = 0.5
    gamma1: float = 0.01
    gamma2: float = 0.01
    gamma1p: float = 0.01
    gamma2p: float = 0.01
    eta1: float = 0.0
    eta2: float = 0.0
    delta1: float = 0.0
    delta2: float = 0.0
    delta1p: float = 0.0
    delta2p: float = 0.0
    delta_cp: float = 0.0
    bath: BathParams = field(default_factory=BathParams)
    n_max: int = DEFAULT_N_MAX
    phonons_enabled: bool = True

    def __post_init__(self):
        validate_model_config(self)

    @property
    def layout(self) -> HilbertLayout:
        return HilbertLayout(self.n_max)

    @property
    def coherent(self) -> bool:
        return self.pump_mode == "coherent"

    def with_n_max(self, n_max: int) -> "ModelConfig":
        return replace(self, n_max=n_max)
