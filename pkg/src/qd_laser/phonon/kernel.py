import logging
import threading
from dataclasses import dataclass, replace
from functools import partial
from typing import Callable, Dict, Iterable, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad, simpson, trapezoid
from scipy.optimize import brentq
from scipy.special import exp1

from ..errors import QuadratureError, KernelTailError
from ..utils import (
    BOLTZMANN_UEV_PER_K,
    DEFAULT_ALPHA_P,
    DEFAULT_OMEGA_B,
    DEFAULT_G1_ABS_UEV,
    FREQUENCY_PANELS,
    GAUSS_NODES_MIN,
    QUAD_EPSABS,
    QUAD_EPSREL,
    QUAD_LIMIT,
    TAU_STEP,
    TAIL_TOL,
    TAU_CAP_CUTOFFS,
    HALF_FOURIER_CHUNK,
    THERMAL_CORRECTION_FLOOR,
)

logging.basicConfig(
    format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
    datefmt="%m/%d/%Y %H:%M:%S",
    level=logging.INFO,
)
logger = logging.getLogger(__name__)

GREENS_KINDS = ("g", "u", "plus", "minus")

# at T = 0 the table stops here and the -alpha_p/tau^2 tail is added analytically
ZERO_TEMPERATURE_TAIL_START = 60.0


def validate_bath(alpha_p: float, omega_b: float, temperature: float, g1_abs: float):
    """
    Validate bath parameters.

    Raises:
    - ValueError: If any parameter lies outside its physical range.
    """
    if not np.isfinite(alpha_p) or alpha_p < 0:
        raise ValueError(f"alpha_p must be finite and non-negative, but got {alpha_p}.")
    if not np.isfinite(omega_b) or omega_b <= 0:
        raise ValueError(f"omega_b must be positive, but got {omega_b}.")
    if not np.isfinite(temperature) or temperature < 0:
        raise ValueError(f"temperature must be non-negative, but got {temperature}.")
    if not np.isfinite(g1_abs) or g1_abs <= 0:
        raise ValueError(f"g1_abs must be positive, but got {g1_abs}.")


@dataclass(frozen=True)
class BathParams:
    """
    Phonon bath with spectral density J(w) = alpha_p w^3 exp(-w^2 / 2 omega_b^2).

    Frequencies are in units of g1; alpha_p is in units of 1/g1^2; temperature in
    kelvin; g1_abs is the energy of g1 in micro-eV and fixes hbar w / k_B T.
    """
    alpha_p: float = DEFAULT_ALPHA_P
    omega_b: float = DEFAULT_OMEGA_B
    temperature: float = 0.0
    g1_abs: float = DEFAULT_G1_ABS_UEV

    def __post_init__(self):
        validate_bath(self.alpha_p, self.omega_b, self.temperature, self.g1_abs)

    @property
    def thermal_scale(self) -> float:
        """c in coth(c w) = coth(hbar w / 2 k_B T), with w in units of g1."""
        if self.temperature == 0:
            return np.inf
        return self.g1_abs / (2.0 * BOLTZMANN_UEV_PER_K * self.temperature)

    @property
    def thermal_correction_bound(self) -> float:
        """Upper bound on Re phi(0)(T) - Re phi(0)(0): alpha_p pi^2 / 12 c^2."""
        if self.temperature == 0:
            return 0.0
        return self.alpha_p * np.pi ** 2 / (12.0 * self.thermal_scale ** 2)

    @property
    def zero_temperature_limit(self) -> bool:
        """True when the thermal occupation changes phi by less than THERMAL_CORRECTION_FLOOR."""
        return self.thermal_correction_bound < THERMAL_CORRECTION_FLOOR


def spectral_density(omega, bath: BathParams):
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError(f"Spectral density is defined for omega >= 0, but got {omega.min()}.")
    return bath.alpha_p * omega ** 3 * np.exp(-omega ** 2 / (2.0 * bath.omega_b ** 2))


def _sine_weight(omega, bath: BathParams):
    # J(w) / w^2
    return bath.alpha_p * omega * np.exp(-omega ** 2 / (2.0 * bath.omega_b ** 2))


def _cosine_weight(omega, bath: BathParams):
    # J(w) / w^2 * coth(c w), finite at w = 0
    omega = np.asarray(omega, dtype=float)
    envelope = bath.alpha_p * np.exp(-omega ** 2 / (2.0 * bath.omega_b ** 2))
    if bath.zero_temperature_limit:
        return envelope * omega
    c = bath.thermal_scale
    x = c * omega
    with np.errstate(divide="ignore", invalid="ignore"):
        weight = np.where(x > 1e-6, omega / np.tanh(x), 1.0 / c + c * omega ** 2 / 3.0)
    return envelope * weight


def _panel_edges(bath: BathParams, panels: int) -> np.ndarray:
    """
    Split [0, panels * omega_b] at omega_b multiples. The coth poles at i pi k / c only
    approach the axis near w = 0, so the first panel is halved until it is narrower than pi / c.
    """
    uniform = np.linspace(0.0, panels * bath.omega_b, panels + 1)
    if bath.zero_temperature_limit:
        return uniform
    halvings = int(np.ceil(np.log2(bath.omega_b * bath.thermal_scale / np.pi)))
    if halvings <= 0:
        return uniform
    inner = bath.omega_b * 2.0 ** -np.arange(halvings, 0, -1, dtype=float)
    return np.concatenate(([0.0], inner, uniform[1:]))


def _adaptive(func: Callable, lo: float, hi: float, epsabs: float, epsrel: float, limit: int,
              tau: float, **weight) -> float:
    result = quad(func, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1, **weight)
    value, abserr = result[0], result[1]
    if len(result) == 4 and abserr > 10.0 * max(epsabs, epsrel * abs(value)):
        raise QuadratureError(
            f"phi({tau:.6g}) quadrature on [{lo:.4g}, {hi:.4g}] did not converge: {result[3]}", abserr)
    return value


def phi(tau: float, bath: BathParams, epsabs: float = QUAD_EPSABS, epsrel: float = QUAD_EPSREL,
        limit: int = QUAD_LIMIT, panels: int = FREQUENCY_PANELS) -> complex:
    """
    Phonon correlation function by adaptive Gauss-Kronrod quadrature.

    phi(tau) = int_0^inf dw J(w)/w^2 [coth(hbar w / 2 k_B T) cos(w tau) - i sin(w tau)]

    Parameters:
    - tau: Non-negative delay in units of 1/g1.
    - bath: Bath parameters.
    - epsabs, epsrel, limit: Tolerances handed to scipy's QUADPACK wrapper; epsabs is shared
      between the frequency panels.
    - panels: Number of omega_b-wide panels the frequency axis is cut into.

    Returns:
    - The complex value of phi(tau).

    Raises:
    - QuadratureError: If a panel fails to reach the requested tolerance.
    """
    if tau < 0:
        raise ValueError(f"phi is evaluated for tau >= 0, but got {tau}.")
    if bath.alpha_p == 0:
        return 0j

    edges = _panel_edges(bath, panels)
    panel_epsabs = epsabs / (len(edges) - 1)
    cosine = lambda w: float(_cosine_weight(w, bath))
    sine = lambda w: float(_sine_weight(w, bath))

    real, imag = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if tau == 0:
            real += _adaptive(cosine, lo, hi, panel_epsabs, epsrel, limit, tau)
        else:
            real += _adaptive(cosine, lo, hi, panel_epsabs, epsrel, limit, tau, weight="cos", wvar=tau)
            imag -= _adaptive(sine, lo, hi, panel_epsabs, epsrel, limit, tau, weight="sin", wvar=tau)
    return complex(real, imag)


def phi_imag_closed_form(tau, bath: BathParams):
    """Im phi(tau) = -alpha_p sqrt(pi/2) omega_b^3 tau exp(-omega_b^2 tau^2 / 2), any temperature."""
    tau = np.asarray(tau, dtype=float)
    wb = bath.omega_b
    return -bath.alpha_p * np.sqrt(np.pi / 2.0) * wb ** 3 * tau * np.exp(-(wb * tau) ** 2 / 2.0)


def phi0_zero_temperature(bath: BathParams) -> float:
    """phi(0) at T = 0, alpha_p omega_b^2."""
    return bath.alpha_p * bath.omega_b ** 2


def franck_condon(bath: BathParams) -> float:
    """<B> = exp(-Re phi(0) / 2)."""
    if bath.alpha_p == 0:
        return 1.0
    return float(np.exp(-phi(0.0, bath).real / 2.0))


def franck_condon_table(bath: BathParams, temperatures: Iterable[float] = (0.0, 5.0, 10.0, 20.0)) -> Dict[float, float]:
    return {float(t): franck_condon(replace(bath, temperature=float(t))) for t in temperatures}


def calibrate_g1_abs(bath: BathParams, temperature: float = 5.0, target: float = 0.9,
                     bracket: Tuple[float, float] = (1.0, 1.0e5)) -> float:
    """
    Find the absolute scale of g1 (micro-eV) for which <B>(temperature) equals target.

    Args:
        bath (BathParams): Bath whose alpha_p and omega_b are kept.
        temperature (float): Calibration temperature in kelvin.
        target (float): Required Franck-Condon factor.
        bracket (tuple): Search interval for g1_abs.

    Returns:
        float: The calibrated g1_abs.
    """
    if temperature <= 0:
        raise ValueError(f"Calibration needs a positive temperature, but got {temperature}.")
    ceiling = franck_condon(replace(bath, temperature=0.0))
    if not 0.0 < target < ceiling:
        raise ValueError(
            f"Target <B>={target} is unreachable: <B> at T=0 is {ceiling:.6f} for alpha_p={bath.alpha_p}, "
            f"omega_b={bath.omega_b}.")

    def _mismatch(g1_abs):
        return franck_condon(replace(bath, temperature=temperature, g1_abs=g1_abs)) - target

    g1_abs = brentq(_mismatch, bracket[0], bracket[1], xtol=1e-10, rtol=1e-12)
    logger.info(f"Calibrated g1_abs = {g1_abs:.6f} ueV so that <B>({temperature} K) = {target}.")
    return float(g1_abs)


class _PhiEvaluator:
    """Vectorized fixed Gauss-Legendre rule for phi on many delays at once."""

    def __init__(self, bath: BathParams, tau_max: float, panels: int = FREQUENCY_PANELS):
        edges = _panel_edges(bath, panels)
        width = float(np.max(np.diff(edges)))
        n_nodes = GAUSS_NODES_MIN + int(np.ceil(width * tau_max))
        nodes, weights = leggauss(n_nodes)
        lo, hi = edges[:-1, None], edges[1:, None]
        omega = (lo + (hi - lo) * (nodes[None, :] + 1.0) / 2.0).ravel()
        quad_weights = ((hi - lo) / 2.0 * weights[None, :]).ravel()
        self._omega = omega
        self._cos_weights = quad_weights * _cosine_weight(omega, bath)
        self._sin_weights = quad_weights * _sine_weight(omega, bath)

    def __call__(self, taus: np.ndarray, chunk: int = 512) -> np.ndarray:
        taus = np.atleast_1d(np.asarray(taus, dtype=float))
        values = np.empty(taus.shape, dtype=complex)
        for start in range(0, taus.size, chunk):
            phase = np.outer(taus[start:start + chunk], self._omega)
            values[start:start + chunk] = np.cos(phase) @ self._cos_weights - 1j * (np.sin(phase) @ self._sin_weights)
        return values


def _greens_from_phi(phi_values: np.ndarray, B: float, which: str) -> np.ndarray:
    if which not in GREENS_KINDS:
        raise ValueError(f"Green's function kind must be one of {GREENS_KINDS}, but got {which!r}.")
    # cosh(phi) - 1 = 2 sinh^2(phi / 2), stable for small phi
    g = 2.0 * B ** 2 * np.sinh(phi_values / 2.0) ** 2
    u = B ** 2 * np.sinh(phi_values)
    return {"g": g, "u": u, "plus": g + u, "minus": g - u}[which]


def _algebraic_tail(delta: np.ndarray, tau_c: float) -> np.ndarray:
    """int_{tau_c}^inf tau^-2 exp(-i delta tau) d tau."""
    delta = np.asarray(delta, dtype=float)
    out = np.full(delta.shape, 1.0 / tau_c, dtype=complex)
    nz = delta != 0
    z = 1j * delta[nz] * tau_c
    out[nz] = np.exp(-z) / tau_c - 1j * delta[nz] * exp1(z)
    return out


class PhononKernel:
    """
    Tabulated bath correlation with <B>, the polaron Green's functions and their
    half-Fourier transforms K(delta) = int_0^inf G(tau) exp(-i delta tau) d tau.

    Build it with `PhononKernel.from_bath`. The table is immutable; the transform
    cache is guarded by a lock so one kernel can serve every worker of a sweep.
    """

    def __init__(self, bath: BathParams, B: float, tau: np.ndarray, phi_table: np.ndarray,
                 evaluator: Optional[_PhiEvaluator], tail_start: Optional[float]):
        self._bath = bath
        self._B = B
        self._tau = tau
        self._phi_table = phi_table
        self._evaluator = evaluator
        self._tail_start = tail_start
        self._greens = {kind: _greens_from_phi(phi_table, B, kind) for kind in GREENS_KINDS}
        self._cache: Dict[Tuple[str, float], complex] = {}
        self._lock = threading.Lock()
        for array in [self._tau, self._phi_table] + list(self._greens.values()):
            array.setflags(write=False)

    @classmethod
    def from_bath(cls, bath: BathParams, tau_step: float = TAU_STEP, tail_tol: float = TAIL_TOL,
                  tau_cap: Optional[float] = None, panels: int = FREQUENCY_PANELS) -> "PhononKernel":
        """
        Tabulate phi on a uniform delay grid long enough for |phi(tau_max)| < tail_tol |phi(0)|.

        Parameters:
        - bath: Bath parameters.
        - tau_step: Delay grid spacing (1/g1). The grid has an even number of intervals for Simpson's rule.
        - tail_tol: Relative size of phi at which the table may stop.
        - tau_cap: Longest admissible table; defaults to 400 / omega_b.
        - panels: Frequency panels of the quadrature.

        Returns:
        - A PhononKernel.

        Raises:
        - KernelTailError: If T > 0 and phi has not decayed by tau_cap.
        """
        if bath.alpha_p == 0:
            tau = np.array([0.0, tau_step, 2.0 * tau_step])
            return cls(bath, 1.0, tau, np.zeros(3, dtype=complex), None, None)

        tau_cap = TAU_CAP_CUTOFFS / bath.omega_b if tau_cap is None else tau_cap
        phi0 = phi(0.0, bath)
        B = float(np.exp(-phi0.real / 2.0))

        tail_start = None
        if bath.zero_temperature_limit:
            tau_max = min(ZERO_TEMPERATURE_TAIL_START / bath.omega_b, tau_cap)
            tail_start = tau_max
        else:
            tau_max = 8.0 / bath.omega_b
            while True:
                tail_values = _PhiEvaluator(bath, tau_max, panels)(np.linspace(0.75 * tau_max, tau_max, 16))
                bound = float(np.max(np.abs(tail_values)) / abs(phi0))
                if bound < tail_tol:
                    break
                if tau_max >= tau_cap:
                    raise KernelTailError(
                        f"phi has not decayed by tau_cap={tau_cap:.4g} at T={bath.temperature} K", bound)
                tau_max = min(2.0 * tau_max, tau_cap)

        intervals = 2 * int(np.ceil(tau_max / (2.0 * tau_step)))
        tau = np.linspace(0.0, intervals * tau_step, intervals + 1)
        evaluator = _PhiEvaluator(bath, tau[-1], panels)
        phi_table = evaluator(tau)
        logger.info(
            f"Phonon kernel at T={bath.temperature} K: <B>={B:.6f}, tau_max={tau[-1]:.4g}, "
            f"{tau.size} delay points{' + algebraic tail' if tail_start is not None else ''}.")
        if bath.temperature == 0:
            logger.warning(
                f"<B>(T=0) = {B:.6f} from the closed form; it is reported as computed, not forced to 1.")
        elif bath.zero_temperature_limit:
            logger.info(
                f"Thermal correction to phi below {bath.thermal_correction_bound:.1e} at T={bath.temperature} K, "
                f"using the T=0 weights.")
        return cls(bath, B, tau, phi_table, evaluator, tau[-1] if tail_start is not None else None)

    @property
    def bath(self) -> BathParams:
        return self._bath

    @property
    def B(self) -> float:
        return self._B

    @property
    def tau(self) -> np.ndarray:
        return self._tau

    @property
    def tau_max(self) -> float:
        return float(self._tau[-1])

    @property
    def phi_table(self) -> np.ndarray:
        return self._phi_table

    @property
    def has_phonons(self) -> bool:
        return self._bath.alpha_p > 0

    def phi_at(self, taus) -> np.ndarray:
        """phi at arbitrary delays with the same quadrature rule as the table."""
        taus = np.atleast_1d(np.asarray(taus, dtype=float))
        if self._evaluator is None:
            return np.zeros(taus.shape, dtype=complex)
        return self._evaluator(taus)

    def greens_table(self, which: str) -> np.ndarray:
        if which not in GREENS_KINDS:
            raise ValueError(f"Green's function kind must be one of {GREENS_KINDS}, but got {which!r}.")
        return self._greens[which]

    def _tail(self, which: str, deltas: np.ndarray) -> np.ndarray:
        if self._tail_start is None or which == "g":
            return np.zeros(deltas.shape, dtype=complex)
        # beyond the table phi ~ -alpha_p / tau^2 and only terms linear in phi survive
        sign = {"u": 1.0, "plus": 1.0, "minus": -1.0}[which]
        linear = -sign * self._B ** 2 * self._bath.alpha_p
        return linear * _algebraic_tail(deltas, self._tail_start)

    def half_fourier_array(self, which: str, deltas, chunk: int = HALF_FOURIER_CHUNK) -> np.ndarray:
        """K(delta) for an array of detunings, Simpson's rule on the delay table plus the T=0 tail."""
        deltas = np.asarray(deltas, dtype=float)
        flat = deltas.ravel()
        out = np.zeros(flat.shape, dtype=complex)
        if not self.has_phonons:
            return out.reshape(deltas.shape)
        greens = self.greens_table(which)
        for start in range(0, flat.size, chunk):
            phase = np.exp(-1j * np.outer(flat[start:start + chunk], self._tau))
            out[start:start + chunk] = simpson(phase * greens[None, :], x=self._tau, axis=1)
        out += self._tail(which, flat)
        return out.reshape(deltas.shape)

    def half_fourier(self, which: str, delta: float) -> complex:
        key = (which, float(delta))
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        value = complex(self.half_fourier_array(which, np.array([delta]))[0])
        with self._lock:
            self._cache[key] = value
        return value

    @property
    def K_plus(self) -> Callable[[float], complex]:
        return partial(self.half_fourier, "plus")

    @property
    def K_minus(self) -> Callable[[float], complex]:
        return partial(self.half_fourier, "minus")

    @property
    def Kg(self) -> Callable[[float], complex]:
        return partial(self.half_fourier, "g")

    @property
    def Ku(self) -> Callable[[float], complex]:
        return partial(self.half_fourier, "u")


def greens(tau, kernel: PhononKernel, which: str):
    """
    Polaron Green's functions at delay tau.

    G_g = <B>^2 (cosh(phi) - 1), G_u = <B>^2 sinh(phi), G_+- = G_g +- G_u = <B>^2 (exp(+-phi) - 1).
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError(f"Green's functions are evaluated for tau >= 0, but got {tau.min()}.")
    values = _greens_from_phi(kernel.phi_at(tau.ravel()), kernel.B, which)
    return values.reshape(tau.shape) if tau.ndim else complex(values[0])


def half_fourier(kernel: PhononKernel, which: str, delta: float) -> complex:
    return kernel.half_fourier(which, delta)


def refinement_gaps(kernel: PhononKernel, deltas, which: str = "plus") -> Tuple[float, float]:
    """
    Max-norm relative gaps of the tabulated K(delta) against a table with half the delay
    step, and against the trapezoid rule on a delay grid ten times finer.
    """
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    reference = kernel.half_fourier_array(which, deltas)
    scale = float(np.max(np.abs(reference)))
    if scale == 0:
        return 0.0, 0.0
    finer = PhononKernel.from_bath(kernel.bath, tau_step=float(kernel.tau[1]) / 2.0)
    simpson_gap = np.max(np.abs(finer.half_fourier_array(which, deltas) - reference)) / scale

    tau = np.linspace(0.0, kernel.tau_max, 10 * (kernel.tau.size - 1) + 1)
    values = greens(tau, kernel, which)
    brute = np.array([trapezoid(values * np.exp(-1j * delta * tau), x=tau) for delta in deltas])
    brute += kernel._tail(which, deltas)
    trapezoid_gap = np.max(np.abs(brute - reference)) / scale
    logger.info(f"K_{which} refinement gaps: Simpson 2x {simpson_gap:.2e}, trapezoid 10x {trapezoid_gap:.2e}.")
    return float(simpson_gap), float(trapezoid_gap)


def null_kernel() -> PhononKernel:
    """Kernel with no exciton-phonon coupling: <B> = 1 and every G vanishes."""
    return PhononKernel.from_bath(BathParams(alpha_p=0.0))
