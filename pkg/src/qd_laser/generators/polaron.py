import logging
from typing import Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from ..errors import EigenDecompositionError
from ..fock_algebra import OperatorMatrix, annihilation, qd_sigma
from ..phonon.kernel import PhononKernel
from ..utils import FLAG_NO_EPI
from .config import ModelConfig
from .hamiltonian import system_hamiltonian, system_operators
from .superoperator import Superoperator, commutator, lindblad_dissipator, left, right, two_sided

logging.basicConfig(
    format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
    datefmt="%m/%d/%Y %H:%M:%S",
    level=logging.INFO,
)
logger = logging.getLogger(__name__)


def effective_franck_condon(config: ModelConfig, kernel: PhononKernel) -> float:
    return kernel.B if config.phonons_enabled else 1.0


def bare_dissipators(config: ModelConfig) -> Superoperator:
    """
    Cavity loss, spontaneous decay, pure dephasing and (incoherent mode) pumping,
    each entering as -(rate / 2) L[O].
    """
    layout = config.layout
    total = lindblad_dissipator(annihilation(layout), config.kappa)
    for i, gamma, gamma_p, eta in ((1, config.gamma1, config.gamma1p, config.eta1),
                                   (2, config.gamma2, config.gamma2p, config.eta2)):
        up, down = qd_sigma(layout, i, "raise"), qd_sigma(layout, i, "lower")
        total = total + lindblad_dissipator(down, gamma) + lindblad_dissipator(up @ down, gamma_p)
        if not config.coherent:
            total = total + lindblad_dissipator(up, eta)
    return Superoperator(layout, total.matrix, kappa=config.kappa)


def phonon_superoperator(fluctuations: Sequence[Tuple[OperatorMatrix, str]], hamiltonian: OperatorMatrix,
                         kernel: PhononKernel) -> Superoperator:
    """
    Polaron phonon term L_ph for the given system Hamiltonian.

    For each fluctuation operator X_j with Green's function G_j, the memory integral
    S_j = int_0^inf G_j(tau) X_j(-tau) d tau is exact in the eigenbasis of H:
    S~_ab = X~_ab K_j(lambda_a - lambda_b). Then
    L_ph rho = sum_j X_j S_j rho - S_j rho X_j + rho S_j^dag X_j - X_j rho S_j^dag.

    Parameters:
    - fluctuations: Pairs (X_j, kind) with kind "g" or "u".
    - hamiltonian: The Hamiltonian generating X_j(-tau).
    - kernel: Bath kernel providing K_j.

    Returns:
    - The superoperator L_ph (it enters the master equation with a minus sign).

    Raises:
    - EigenDecompositionError: If H or its eigendecomposition is not finite.
    """
    layout = hamiltonian.layout
    total = Superoperator.zero(layout)
    if not kernel.has_phonons:
        return total
    if not np.all(np.isfinite(hamiltonian.entries)):
        raise EigenDecompositionError("System Hamiltonian has non-finite entries.")
    try:
        energies, vectors = np.linalg.eigh(hamiltonian.entries)
    except np.linalg.LinAlgError as e:
        raise EigenDecompositionError(f"Eigendecomposition of H_s failed: {e}") from e
    if not (np.all(np.isfinite(energies)) and np.all(np.isfinite(vectors))):
        raise EigenDecompositionError("Eigendecomposition of H_s returned non-finite values.")

    transitions = energies[:, None] - energies[None, :]
    for x_op, kind in fluctuations:
        x_eigen = vectors.conj().T @ x_op.entries @ vectors
        memory = vectors @ (x_eigen * kernel.half_fourier_array(kind, transitions)) @ vectors.conj().T
        x = x_op.entries
        memory_dag = memory.conj().T
        matrix = (left(layout, x @ memory) - two_sided(memory, x)
                  + right(layout, memory_dag @ x) - two_sided(x, memory_dag))
        total = total + Superoperator(layout, sp.csr_matrix(matrix))
    return total


def full_polaron_generator(config: ModelConfig, kernel: PhononKernel) -> Superoperator:
    """
    Polaron master equation with L_ph evaluated for the full system Hamiltonian:
    d rho / dt = -i [H_s, rho] - L_ph rho - sum of bare dissipators.
    """
    B = effective_franck_condon(config, kernel)
    hamiltonian = system_hamiltonian(config, B)
    generator = commutator(hamiltonian) + bare_dissipators(config)
    if config.phonons_enabled:
        x_g, x_u = system_operators(config)
        generator = generator - phonon_superoperator(((x_g, "g"), (x_u, "u")), hamiltonian, kernel)
    else:
        generator = generator.with_flags(FLAG_NO_EPI)
    logger.debug(f"Full polaron generator: dim={config.layout.dim}, nnz={generator.matrix.nnz}.")
    return generator
