from typing import Dict, Tuple

import numpy as np

from ..fock_algebra import (
    HilbertLayout,
    OperatorMatrix,
    annihilation,
    collective_ket,
    number,
    qd_sigma,
)
from .config import ModelConfig


def cavity_raising_operators(layout: HilbertLayout) -> Tuple[OperatorMatrix, OperatorMatrix]:
    """sigma_1^+ a and sigma_2^+ a."""
    a = annihilation(layout)
    return qd_sigma(layout, 1, "raise") @ a, qd_sigma(layout, 2, "raise") @ a


def pump_raising_operators(layout: HilbertLayout) -> Tuple[OperatorMatrix, OperatorMatrix]:
    return qd_sigma(layout, 1, "raise"), qd_sigma(layout, 2, "raise")


def coupling_operator(config: ModelConfig, include_cavity: bool = True, include_pump: bool = True) -> OperatorMatrix:
    """
    Sum of raising couplings g_i sigma_i^+ a (+ eta_i sigma_i^+ in coherent mode).
    """
    layout = config.layout
    total = OperatorMatrix(layout, np.zeros((layout.dim, layout.dim)))
    if include_cavity:
        r1, r2 = cavity_raising_operators(layout)
        total = total + config.g1 * r1 + config.g2 * r2
    if include_pump and config.coherent:
        p1, p2 = pump_raising_operators(layout)
        total = total + config.eta1 * p1 + config.eta2 * p2
    return total


def system_operators(config: ModelConfig, include_cavity: bool = True,
                     include_pump: bool = True) -> Tuple[OperatorMatrix, OperatorMatrix]:
    """
    Polaron fluctuation operators X_g = A + A^dag and X_u = i (A - A^dag), A the coupling operator.
    """
    a_op = coupling_operator(config, include_cavity, include_pump)
    x_g = OperatorMatrix(a_op.layout, a_op.entries + a_op.entries.conj().T, hermitian=True)
    x_u = OperatorMatrix(a_op.layout, 1j * (a_op.entries - a_op.entries.conj().T), hermitian=True)
    return x_g, x_u


def diagonal_hamiltonian(config: ModelConfig) -> OperatorMatrix:
    """Bare QD (and, in coherent mode, cavity) energies without any coupling."""
    layout = config.layout
    n1 = qd_sigma(layout, 1, "raise") @ qd_sigma(layout, 1, "lower")
    n2 = qd_sigma(layout, 2, "raise") @ qd_sigma(layout, 2, "lower")
    if config.coherent:
        h = config.delta1p * n1 + config.delta2p * n2 + config.delta_cp * number(layout)
    else:
        h = config.delta1 * n1 + config.delta2 * n2
    return OperatorMatrix(layout, h.entries, hermitian=True)


def system_hamiltonian(config: ModelConfig, franck_condon_factor: float) -> OperatorMatrix:
    """
    H_s = sum_i Delta_i sigma_i^+ sigma_i^- + <B> X_g.

    In coherent mode the detunings are taken from the pump frame and the cavity adds
    Delta_cp a^dag a; X_g then contains the drive eta_i (sigma_i^+ + sigma_i^-).

    Args:
        config (ModelConfig): The model.
        franck_condon_factor (float): <B>, or 1 without phonons.

    Returns:
        OperatorMatrix: Hermitian H_s.
    """
    x_g, _ = system_operators(config)
    h = diagonal_hamiltonian(config) + franck_condon_factor * x_g
    return OperatorMatrix(h.layout, h.entries, hermitian=True)


def dressed_states(layout: HilbertLayout, g: float = 1.0, B: float = 1.0) -> Dict[str, Tuple[float, np.ndarray]]:
    """
    Eigenstates of the resonant, symmetrically coupled two-dot cavity (Delta = 0, g1 = g2 = g)
    in the lowest three excitation manifolds, keyed psi1+, psi1-, psi2_0, psi2+, psi2-,
    psi3_0, psi3+, psi3-, with their energies in units of g1.
    """
    if layout.n_max < 3:
        raise ValueError(f"Dressed states up to three excitations need n_max >= 3, but got {layout.n_max}.")

    def ket(which, n):
        return collective_ket(layout, which, n)

    s2, s3, s5, s6, s10 = np.sqrt([2.0, 3.0, 5.0, 6.0, 10.0])
    bg = B * g
    states = {}
    for sign, tag in ((1.0, "+"), (-1.0, "-")):
        states[f"psi1{tag}"] = (sign * s2 * bg, (ket("plus", 0) + sign * ket("gg", 1)) / s2)
        states[f"psi2{tag}"] = (sign * s6 * bg, (ket("ee", 0) + sign * s3 * ket("plus", 1) + s2 * ket("gg", 2)) / s6)
        states[f"psi3{tag}"] = (
            sign * s10 * bg, (s2 * ket("ee", 1) + sign * s5 * ket("plus", 2) + s3 * ket("gg", 3)) / s10)
    states["psi2_0"] = (0.0, (-s2 * ket("ee", 0) + ket("gg", 2)) / s3)
    states["psi3_0"] = (0.0, (-s3 * ket("ee", 1) + s2 * ket("gg", 3)) / s5)
    order = ("psi1+", "psi1-", "psi2_0", "psi2+", "psi2-", "psi3_0", "psi3+", "psi3-")
    return {key: states[key] for key in order}
