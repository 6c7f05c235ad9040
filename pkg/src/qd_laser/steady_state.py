import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import splu

from .errors import ConvergenceError, IntegrationError, SteadyStateError
from .fock_algebra import HilbertLayout, collective_projectors, number
from .generators import ModelConfig, Superoperator, build_generator, trace_row, unvec, vec
from .phonon.kernel import PhononKernel
from .utils import DEGENERACY_TOL, HERMITIAN_TOL, N_MAX_CAP, N_MAX_STEP, TRACE_TOL

logging.basicConfig(
    format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
    datefmt="%m/%d/%Y %H:%M:%S",
    level=logging.INFO,
)
logger = logging.getLogger(__name__)

# dense SVD for the null-space estimate is skipped above this vectorized size
NULL_SPACE_DENSE_LIMIT = 4096
RESIDUAL_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class SteadyState:
    """
    A density matrix with the observables read off it.

    pn_ab has one row per QD pair label (gg, ge, eg, ee) and one column per photon number.
    """
    layout: HilbertLayout
    rho: np.ndarray
    residual: float
    populations: Dict[str, float]
    mean_n: float
    pn: np.ndarray
    pn_ab: np.ndarray
    hermiticity_deviation: float = 0.0

    @property
    def min_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh(self.rho)))

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))


def observables(rho: np.ndarray, layout: HilbertLayout) -> Tuple[Dict[str, float], float, np.ndarray, np.ndarray]:
    """
    Collective populations, <n>, P_n and P_n^{ab} of a density matrix.

    Parameters:
    - rho: dim x dim density matrix in the canonical basis.
    - layout: Its Hilbert space.

    Returns:
    - (populations keyed ee/plus/minus/gg, mean photon number, P_n, P_n^{ab}).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (layout.dim, layout.dim):
        raise ValueError(f"rho shape {rho.shape} does not match layout dimension {layout.dim}.")
    populations = {key: float(np.real(proj.expect(rho))) for key, proj in collective_projectors(layout).items()}
    mean_n = float(np.real(number(layout).expect(rho)))
    pn_ab = np.real(np.diag(rho)).reshape(4, layout.n_photon)
    return populations, mean_n, pn_ab.sum(axis=0), pn_ab


def _snapshot(generator: Superoperator, rho: np.ndarray, hermiticity_deviation: float = 0.0) -> SteadyState:
    layout = generator.layout
    residual = float(np.max(np.abs(generator.matrix @ vec(rho)), initial=0.0))
    populations, mean_n, pn, pn_ab = observables(rho, layout)
    return SteadyState(layout, rho, residual, populations, mean_n, pn, pn_ab, hermiticity_deviation)


def null_space_dimension(generator: Superoperator, tol: float = DEGENERACY_TOL) -> Optional[int]:
    """Number of singular values below tol * largest, or None when the generator is too large for dense SVD."""
    if generator.matrix.shape[0] > NULL_SPACE_DENSE_LIMIT:
        return None
    singular = np.linalg.svd(generator.toarray(), compute_uv=False)
    if singular[0] == 0:
        return int(singular.size)
    return int(np.sum(singular < tol * singular[0]))


def _constrained_system(generator: Superoperator) -> Tuple[sp.csc_matrix, np.ndarray]:
    """L with the |gg,0><gg,0| row replaced by the trace functional."""
    layout = generator.layout
    size = layout.dim ** 2
    anchor = layout.index("g", "g", 0) * (layout.dim + 1)
    keep = np.ones(size)
    keep[anchor] = 0.0
    trace = trace_row(layout).tocoo()
    constraint = sp.csr_matrix((trace.data, (np.full(trace.nnz, anchor), trace.col)), shape=(size, size))
    system = sp.diags(keep) @ generator.matrix + constraint
    rhs = np.zeros(size, dtype=complex)
    rhs[anchor] = 1.0
    return system.tocsc(), rhs


def solve_steady(generator: Superoperator) -> SteadyState:
    """
    Stationary state of a trace-preserving generator by sparse LU with the trace constraint
    and one step of iterative refinement.

    Args:
        generator (Superoperator): The generator L.

    Returns:
        SteadyState: rho with L(rho) = 0 and tr(rho) = 1, Hermitized.

    Raises:
        SteadyStateError: If the constrained system is singular or the residual is not small,
            which signals a degenerate stationary manifold.
    """
    system, rhs = _constrained_system(generator)
    try:
        lu = splu(system)
    except RuntimeError as e:
        raise SteadyStateError(f"Steady-state system is singular: {e}", null_space_dimension(generator)) from e
    x = lu.solve(rhs)
    x = x + lu.solve(rhs - system @ x)
    if not np.all(np.isfinite(x)):
        raise SteadyStateError("Steady-state solve produced non-finite values", null_space_dimension(generator))

    rho = unvec(x, generator.layout.dim)
    deviation = float(np.max(np.abs(rho - rho.conj().T)))
    rho = (rho + rho.conj().T) / 2.0
    state = _snapshot(generator, rho, deviation)

    scale = max(generator.norm_max(), 1.0)
    if state.residual > RESIDUAL_RTOL * scale or abs(state.trace - 1.0) > TRACE_TOL:
        raise SteadyStateError(
            f"Steady-state residual {state.residual:.3e} exceeds {RESIDUAL_RTOL:.0e} * |L|_max "
            f"(trace {state.trace:.12f})", null_space_dimension(generator))
    if deviation > 1e3 * HERMITIAN_TOL:
        logger.warning(f"Steady state deviated from Hermitian by {deviation:.3e} before symmetrization.")
    return state


def evolve(generator: Superoperator, rho0: np.ndarray, t_final: float, dt_control: float,
           rtol: float = 1e-8, atol: float = 1e-10) -> List[Tuple[float, SteadyState]]:
    """
    Integrate d rho / dt = L rho with a stiff BDF integrator.

    Parameters:
    - generator: The generator L.
    - rho0: Initial density matrix.
    - t_final: End time in units of 1/g1.
    - dt_control: Spacing of the returned snapshots.
    - rtol, atol: Integrator tolerances.

    Returns:
    - List of (t, snapshot) pairs from t = 0 to t_final.

    Raises:
    - IntegrationError: If the integrator stops before t_final.
    """
    layout = generator.layout
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (layout.dim, layout.dim):
        raise ValueError(f"rho0 shape {rho0.shape} does not match layout dimension {layout.dim}.")
    if abs(np.trace(rho0) - 1.0) > TRACE_TOL or np.max(np.abs(rho0 - rho0.conj().T)) > HERMITIAN_TOL:
        raise ValueError("rho0 must be Hermitian with unit trace.")
    if t_final <= 0 or dt_control <= 0:
        raise ValueError(f"t_final and dt_control must be positive, but got {t_final} and {dt_control}.")

    times = np.append(np.arange(0.0, t_final, dt_control), t_final)
    matrix = generator.matrix

    def rhs(t, y):
        return matrix @ y

    solution = solve_ivp(rhs, (0.0, t_final), vec(rho0), method="BDF", t_eval=times, jac=matrix,
                         rtol=rtol, atol=atol)
    if solution.status == -1:
        reached = float(solution.t[-1]) if solution.t.size else 0.0
        raise IntegrationError(f"Integration failed: {solution.message}", reached)
    return [(float(t), _snapshot(generator, unvec(y, layout.dim))) for t, y in zip(solution.t, solution.y.T)]


def _converged(previous: SteadyState, current: SteadyState, tolerance: float) -> bool:
    if abs(current.mean_n - previous.mean_n) > tolerance * abs(current.mean_n) + 1e-12:
        return False
    return all(abs(current.populations[key] - previous.populations[key]) < tolerance
               for key in current.populations)


def converge_n_max(config: ModelConfig, kernel: PhononKernel, tolerance: float = 1e-3, engine: str = "sme",
                   step: int = N_MAX_STEP, cap: int = N_MAX_CAP) -> Tuple[int, SteadyState]:
    """
    Smallest photon truncation whose steady state agrees with the next one (n_max + step).

    Args:
        config (ModelConfig): Model; its n_max is the first truncation tried.
        kernel (PhononKernel): Bath kernel for config.bath.
        tolerance (float): Relative tolerance on <n> and absolute tolerance on the populations.
        engine (str): "sme" or "full".
        step (int): Truncation increment.
        cap (int): Largest truncation tried.

    Returns:
        tuple: (n_max, SteadyState at that n_max).

    Raises:
        ConvergenceError: If the cap is reached without two consecutive truncations agreeing.
    """
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, but got {tolerance}.")
    n_max = config.n_max
    previous = None
    trend = []
    while True:
        state = solve_steady(build_generator(config.with_n_max(n_max), kernel, engine))
        trend.append((n_max, state.mean_n))
        if previous is not None and _converged(previous[1], state, tolerance):
            return previous
        previous = (n_max, state)
        if n_max >= cap:
            raise ConvergenceError(f"<n> not converged to {tolerance} by n_max={cap}", trend)
        n_max = min(n_max + step, cap)
        if len(trend) > 1:
            logger.warning(f"Raising n_max to {n_max} (<n>={state.mean_n:.6g}, P(n_max)={state.pn[-1]:.3e}).")
