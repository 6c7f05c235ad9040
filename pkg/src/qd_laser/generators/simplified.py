import logging
from typing import Optional, Tuple

import numpy as np

from ..fock_algebra import OperatorMatrix
from ..phonon.kernel import PhononKernel
from ..phonon.rates import RateSet, rates_coherent, rates_incoherent
from ..utils import FLAG_NO_EPI, FLAG_OMEGA_PLUS_FIX
from .config import ModelConfig
from .hamiltonian import cavity_raising_operators, pump_raising_operators, system_hamiltonian
from .polaron import bare_dissipators, effective_franck_condon
from .superoperator import Superoperator, commutator, cross_dissipator, lindblad_dissipator, sandwich

logging.basicConfig(
    format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
    datefmt="%m/%d/%Y %H:%M:%S",
    level=logging.INFO,
)
logger = logging.getLogger(__name__)


def model_rates(config: ModelConfig, kernel: PhononKernel) -> RateSet:
    """Rates for the configured pump mode; all zero when phonons are switched off."""
    if not config.phonons_enabled or not kernel.has_phonons:
        return RateSet()
    if config.coherent:
        return rates_coherent(config.g1, config.g2, config.eta1, config.eta2, config.delta1p, config.delta2p,
                              kernel, delta_cp=config.delta_cp)
    return rates_incoherent(config.g1, config.g2, config.delta1, config.delta2, kernel)


def _pair_terms(ops: Tuple[OperatorMatrix, OperatorMatrix], shifts, two_excitation: complex,
                exchange) -> OperatorMatrix:
    """
    Phonon-induced Hamiltonian of one operator family R_1, R_2:
    sum_i shift^+ R_i R_i^dag + shift^- R_i^dag R_i
    - (i W R_1 R_2 + h.c.) - (i W_+ R_1 R_2^dag + i W_- R_1^dag R_2 + h.c.).
    """
    r1, r2 = ops
    layout = r1.layout
    h = OperatorMatrix(layout, np.zeros((layout.dim, layout.dim)))
    for r, (shift_raise, shift_lower) in zip(ops, shifts):
        h = h + np.real(shift_raise) * (r @ r.dag()) + np.real(shift_lower) * (r.dag() @ r)
    coupling = (1j * two_excitation) * (r1 @ r2) + (1j * exchange[0]) * (r1 @ r2.dag()) \
        + (1j * exchange[1]) * (r1.dag() @ r2)
    return h - (coupling + coupling.dag())


def effective_hamiltonian(config: ModelConfig, kernel: PhononKernel, rates: RateSet) -> OperatorMatrix:
    layout = config.layout
    h = system_hamiltonian(config, effective_franck_condon(config, kernel))
    h = h + _pair_terms(cavity_raising_operators(layout), rates.delta_i_pm, rates.omega_2ph, rates.omega_pm)
    if config.coherent:
        h = h + _pair_terms(pump_raising_operators(layout), rates.delta_p_sigma_pm, rates.omega_p_pp,
                            rates.omega_p_pm)
    return OperatorMatrix(layout, h.entries, hermitian=True)


def _cavity_dissipators(config: ModelConfig, rates: RateSet) -> Superoperator:
    r1, r2 = cavity_raising_operators(config.layout)
    total = Superoperator.zero(config.layout)
    for r, (gamma_raise, gamma_lower), (omega_raise, omega_lower) in zip(
            (r1, r2), rates.gamma_i_pm, rates.omega_ii_pm):
        total = total + lindblad_dissipator(r.dag(), np.real(gamma_raise)) \
            + lindblad_dissipator(r, np.real(gamma_lower))
        total = total + sandwich(r.dag(), r.dag(), omega_raise) + sandwich(r, r, omega_lower)
    crosses = (
        (r2, r1, rates.gamma12_mm),
        (r2.dag(), r1.dag(), rates.gamma12_pp),
        (r2, r1.dag(), rates.gamma12_pm),
        (r2.dag(), r1, rates.gamma12_mp),
        (r1, r2, rates.gamma21_mm),
        (r1.dag(), r2.dag(), rates.gamma21_pp),
        (r1, r2.dag(), rates.gamma21_pm),
        (r1.dag(), r2, rates.gamma21_mp),
    )
    for op1, op2, rate in crosses:
        total = total + cross_dissipator(op1, op2, rate)
    return total


def _pump_dissipators(config: ModelConfig, rates: RateSet) -> Superoperator:
    p1, p2 = pump_raising_operators(config.layout)
    sigma = {(1, "+"): p1, (1, "-"): p1.dag(), (2, "+"): p2, (2, "-"): p2.dag()}
    total = Superoperator.zero(config.layout)
    for i, (gamma_up, gamma_down), (omega_up, omega_down) in zip(
            (1, 2), rates.gamma_p_sigma_pm, rates.omega_p_sigsig):
        up, down = sigma[(i, "+")], sigma[(i, "-")]
        total = total + lindblad_dissipator(up, np.real(gamma_up)) + lindblad_dissipator(down, np.real(gamma_down))
        total = total + sandwich(up, up, omega_up) + sandwich(down, down, omega_down)
    for (i, k, j, l), rate in rates.gamma_p_sigsig.items():
        total = total + cross_dissipator(sigma[(i, k)], sigma[(j, l)], rate)
    return total


def sme_generator(config: ModelConfig, kernel: PhononKernel, rates: Optional[RateSet] = None) -> Superoperator:
    """
    Simplified master equation: phonon effects condensed into the scalar rates of a RateSet.

    Args:
        config (ModelConfig): The model.
        kernel (PhononKernel): Supplies <B> and, when rates is None, the rates.
        rates (RateSet, optional): Precomputed rates for config's pump mode.

    Returns:
        Superoperator: -i [H_eff, .] plus bare, phonon Lindblad, cross and Omega sandwich terms.
    """
    if rates is None:
        rates = model_rates(config, kernel)
    generator = commutator(effective_hamiltonian(config, kernel, rates)) + bare_dissipators(config)
    generator = generator + _cavity_dissipators(config, rates)
    if config.coherent:
        generator = generator + _pump_dissipators(config, rates)
        if any(value != 0 for value in rates.omega_pm):
            generator = generator.with_flags(FLAG_OMEGA_PLUS_FIX)
    if not config.phonons_enabled:
        generator = generator.with_flags(FLAG_NO_EPI)
    logger.debug(f"SME generator: dim={config.layout.dim}, nnz={generator.matrix.nnz}.")
    return generator
