import logging
from dataclasses import dataclass, replace
from typing import List

import numpy as np

from .errors import QdLaserError
from .generators import ModelConfig, build_generator, dressed_states, system_hamiltonian
from .phonon.kernel import (
    BathParams,
    PhononKernel,
    franck_condon,
    phi,
    phi0_zero_temperature,
    phi_imag_closed_form,
    refinement_gaps,
)
from .rate_equation import reduce
from .steady_state import solve_steady
from .utils import KERNEL_REFINE_RTOL, KERNEL_TRAPEZOID_RTOL, NEGATIVITY_TOL, TRACE_TOL

logging.basicConfig(
    format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
    datefmt="%m/%d/%Y %H:%M:%S",
    level=logging.INFO,
)
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    limit: float
    passed: bool

    def __str__(self):
        status = "ok" if self.passed else "FAIL"
        return f"{status:4s} {self.name:<40s} {self.value:.3e} (limit {self.limit:.1e})"


def _check(name: str, value: float, limit: float) -> CheckResult:
    return CheckResult(name, float(value), limit, bool(np.isfinite(value) and value <= limit))


def bath_checks(bath: BathParams) -> List[CheckResult]:
    """<B>(T=0) and Im phi against their closed forms."""
    cold = replace(bath, temperature=0.0)
    expected = np.exp(-phi0_zero_temperature(cold) / 2.0)
    results = [_check("<B>(T=0) closed form, relative", abs(franck_condon(cold) - expected) / expected, 1e-6)]
    taus = np.array([0.05, 0.1, 0.2]) / (bath.omega_b / 10.0)
    gap = max(abs(phi(t, bath).imag - phi_imag_closed_form(t, bath)) for t in taus)
    results.append(_check("Im phi closed form", gap, 1e-8))
    return results


def kernel_checks(kernel: PhononKernel, deltas=(-2.0, -0.5, 0.0, 0.5, 2.0)) -> List[CheckResult]:
    results = []
    for which in ("plus", "minus"):
        simpson_gap, trapezoid_gap = refinement_gaps(kernel, deltas, which)
        results.append(_check(f"K_{which} vs 2x finer delay grid", simpson_gap, KERNEL_REFINE_RTOL))
        results.append(_check(f"K_{which} vs 10x trapezoid", trapezoid_gap, KERNEL_TRAPEZOID_RTOL))
    return results


def dressed_state_checks(n_max: int, B: float) -> List[CheckResult]:
    """Overlap of the resonant dressed states with the matching eigenspaces of H_s."""
    config = ModelConfig(n_max=max(n_max, 4))
    energies, vectors = np.linalg.eigh(system_hamiltonian(config, B).entries)
    worst = 0.0
    for energy, state in dressed_states(config.layout, 1.0, B).values():
        block = vectors[:, np.abs(energies - energy) < 1e-8]
        worst = max(worst, abs(1.0 - np.linalg.norm(block.conj().T @ state) ** 2))
    return [_check("dressed-state overlaps", worst, 1e-10)]


def generator_checks(config: ModelConfig, kernel: PhononKernel, engine: str, seed: int = 0) -> List[CheckResult]:
    """Trace and Hermiticity preservation, steady-state positivity and, for the SME, the reduction identities."""
    generator = build_generator(config, kernel, engine)
    scale = max(generator.norm_max(), 1.0)
    results = [_check(f"{engine}: trace functional", generator.trace_deviation() / scale, TRACE_TOL)]

    rng = np.random.default_rng(seed)
    dim = config.layout.dim
    worst = 0.0
    for _ in range(3):
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        rho = m @ m.conj().T
        rho /= np.trace(rho)
        out = generator.apply(rho)
        worst = max(worst, np.max(np.abs(out - out.conj().T)))
    results.append(_check(f"{engine}: Hermiticity of L(rho)", worst / scale, 1e-12))

    state = solve_steady(generator)
    results.append(_check(f"{engine}: steady-state negativity", max(-state.min_eigenvalue, 0.0), NEGATIVITY_TOL))
    if engine == "sme":
        model = reduce(generator)
        results.append(_check("sme: reduced column sums", np.max(np.abs(model.column_sums())), 1e-8))
        results.append(_check("sme: balance identity", model.balance_gap(), 1e-8))
        gap = np.max(np.abs(model.diag_steady.ravel() - np.real(np.diag(state.rho))))
        results.append(_check("sme: reduced vs full diagonal", gap, 1e-8))
    return results


def run_checks(config: ModelConfig, kernel: PhononKernel) -> List[CheckResult]:
    """The invariant suite on one model: bath closed forms, dressed states and both generators."""
    results = bath_checks(config.bath) if config.bath.alpha_p > 0 else []
    if kernel.has_phonons:
        results += kernel_checks(kernel)
    results += dressed_state_checks(config.n_max, kernel.B)
    for engine in ("full", "sme"):
        try:
            results += generator_checks(config, kernel, engine)
        except QdLaserError as e:
            logger.warning(f"{engine} checks aborted: {e}")
            results.append(CheckResult(f"{engine}: {type(e).__name__}", float("nan"), 0.0, False))
    return results
