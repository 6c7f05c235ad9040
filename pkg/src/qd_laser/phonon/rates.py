from dataclasses import dataclass, field, fields
from typing import Dict, Tuple

import numpy as np

from .kernel import PhononKernel

Pair = Tuple[complex, complex]
SigmaKey = Tuple[int, str, int, str]

ZERO_PAIR = (0j, 0j)
SIGMA_CROSS_KEYS: Tuple[SigmaKey, ...] = tuple(
    (i, k, j, l) for i, j in ((2, 1), (1, 2)) for k in "+-" for l in "+-")


@dataclass(frozen=True)
class RateSet:
    """
    Phonon-induced rates and shifts of the simplified master equation.

    Cavity family (raising operators sigma_i^+ a):
        delta_i_pm[i]      (delta_i^+, delta_i^-): shifts multiplying sigma^+ a a^dag sigma^- and a^dag sigma^- sigma^+ a
        omega_2ph          two-photon coupling of sigma_1^+ sigma_2^+ a^2
        omega_pm           (Omega_+, Omega_-): exchange via sigma_1^+ a a^dag sigma_2^- and a^dag sigma_1^- sigma_2^+ a
        gamma_i_pm[i]      (Gamma_i^+, Gamma_i^-): rates of L[a^dag sigma_i^-] and L[sigma_i^+ a]
        gamma12_*          cross rates of L[R_2^x, R_1^y]; gamma21_* the 1 <-> 2 partners
        omega_ii_pm[i]     (Omega_ii^{++}, Omega_ii^{--}): non-Lindblad sandwiches R^dag rho R^dag and R rho R

    Pump family (coherent mode, raising operators sigma_i^+), named by the operator they multiply:
        delta_p_sigma_pm[i]  shifts of sigma_i^+ sigma_i^- and sigma_i^- sigma_i^+
        omega_p_pp           coupling of sigma_1^+ sigma_2^+
        omega_p_pm           (Omega_p^+, Omega_p^-) of sigma_1^+ sigma_2^- and sigma_1^- sigma_2^+
        gamma_p_sigma_pm[i]  rates of L[sigma_i^+] and L[sigma_i^-]
        gamma_p_sigsig       {(i, k, j, l): rate of L[sigma_i^k, sigma_j^l]}
        omega_p_sigsig[i]    sandwiches sigma_i^+ rho sigma_i^+ and sigma_i^- rho sigma_i^-
    """
    delta_i_pm: Tuple[Pair, Pair] = (ZERO_PAIR, ZERO_PAIR)
    omega_2ph: complex = 0j
    omega_pm: Pair = ZERO_PAIR
    gamma_i_pm: Tuple[Pair, Pair] = (ZERO_PAIR, ZERO_PAIR)
    gamma12_pp: complex = 0j
    gamma12_mm: complex = 0j
    gamma12_pm: complex = 0j
    gamma12_mp: complex = 0j
    gamma21_pp: complex = 0j
    gamma21_mm: complex = 0j
    gamma21_pm: complex = 0j
    gamma21_mp: complex = 0j
    omega_ii_pm: Tuple[Pair, Pair] = (ZERO_PAIR, ZERO_PAIR)

    delta_p_sigma_pm: Tuple[Pair, Pair] = (ZERO_PAIR, ZERO_PAIR)
    omega_p_pp: complex = 0j
    omega_p_pm: Pair = ZERO_PAIR
    gamma_p_sigma_pm: Tuple[Pair, Pair] = (ZERO_PAIR, ZERO_PAIR)
    gamma_p_sigsig: Dict[SigmaKey, complex] = field(default_factory=lambda: {key: 0j for key in SIGMA_CROSS_KEYS})
    omega_p_sigsig: Tuple[Pair, Pair] = (ZERO_PAIR, ZERO_PAIR)

    def magnitudes(self) -> np.ndarray:
        """Every stored value flattened, for bulk checks."""
        values = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, dict):
                values.extend(value.values())
            else:
                values.extend(np.ravel(np.asarray(value, dtype=complex)))
        return np.asarray(values, dtype=complex)


class _Family:
    """
    Rates generated by two raising operators R_1, R_2 with real couplings c_i and
    bare frequencies w_i, under L_ph evaluated with a diagonal Hamiltonian.

    The coefficient of the sandwich X rho Y (X, Y in {R_i, R_i^dag}) is
    c_X c_Y [K_s(w_X) + conj(K_s(-w_Y))], with w(R^dag) = -w(R) and s = "minus"
    when X and Y are of the same type.
    """

    def __init__(self, kernel: PhononKernel, couplings: Tuple[float, float], frequencies: Tuple[float, float]):
        self.kernel = kernel
        self.c = {1: float(couplings[0]), 2: float(couplings[1])}
        self.w = {1: float(frequencies[0]), 2: float(frequencies[1])}

    def _op(self, i: int, dagger: bool) -> Tuple[float, float]:
        return self.c[i], -self.w[i] if dagger else self.w[i]

    def sandwich(self, x: Tuple[int, bool], y: Tuple[int, bool]) -> complex:
        cx, wx = self._op(*x)
        cy, wy = self._op(*y)
        if cx == 0 or cy == 0:
            return 0j
        which = "minus" if x[1] == y[1] else "plus"
        return cx * cy * (self.kernel.half_fourier(which, wx) + np.conj(self.kernel.half_fourier(which, -wy)))

    def lindblad_rates(self, i: int) -> Pair:
        """(rate of L[R_i^dag], rate of L[R_i])."""
        c2 = self.c[i] ** 2
        if c2 == 0:
            return ZERO_PAIR
        kp = self.kernel.K_plus
        # the full-line transform of G_+ is a phonon sideband spectrum; clip rounding below zero
        return (complex(max(2 * c2 * kp(-self.w[i]).real, 0.0)),
                complex(max(2 * c2 * kp(self.w[i]).real, 0.0)))

    def shifts(self, i: int) -> Pair:
        """(shift of R_i R_i^dag, shift of R_i^dag R_i)."""
        c2 = self.c[i] ** 2
        if c2 == 0:
            return ZERO_PAIR
        kp = self.kernel.K_plus
        return complex(c2 * kp(-self.w[i]).imag), complex(c2 * kp(self.w[i]).imag)

    def two_excitation(self) -> complex:
        """Coupling of R_1 R_2."""
        cc = self.c[1] * self.c[2]
        if cc == 0:
            return 0j
        km = self.kernel.K_minus
        total = sum(km(self.w[i]) - np.conj(km(-self.w[i])) for i in (1, 2))
        return cc / 2 * total

    def exchange(self) -> Pair:
        """(coupling of R_1 R_2^dag, coupling of R_1^dag R_2)."""
        cc = self.c[1] * self.c[2]
        if cc == 0:
            return ZERO_PAIR
        kp = self.kernel.K_plus
        raised = cc / 2 * (kp(-self.w[2]) - np.conj(kp(-self.w[1])))
        lowered = cc / 2 * (kp(self.w[2]) - np.conj(kp(self.w[1])))
        return raised, lowered

    def self_sandwiches(self, i: int) -> Pair:
        """(R^dag rho R^dag, R rho R) coefficients."""
        return self.sandwich((i, True), (i, True)), self.sandwich((i, False), (i, False))


def _cavity_fields(family: _Family) -> dict:
    s = family.sandwich
    return dict(
        delta_i_pm=(family.shifts(1), family.shifts(2)),
        omega_2ph=family.two_excitation(),
        omega_pm=family.exchange(),
        gamma_i_pm=(family.lindblad_rates(1), family.lindblad_rates(2)),
        gamma12_mm=s((2, False), (1, False)),
        gamma12_pp=s((2, True), (1, True)),
        gamma12_pm=s((2, False), (1, True)),
        gamma12_mp=s((2, True), (1, False)),
        gamma21_mm=s((1, False), (2, False)),
        gamma21_pp=s((1, True), (2, True)),
        gamma21_pm=s((1, False), (2, True)),
        gamma21_mp=s((1, True), (2, False)),
        omega_ii_pm=(family.self_sandwiches(1), family.self_sandwiches(2)),
    )


def rates_incoherent(g1: float, g2: float, delta1: float, delta2: float, kernel: PhononKernel) -> RateSet:
    """
    Phonon rates for incoherent pumping, with sigma_i^+ a rotating at Delta_i.

    Args:
        g1, g2 (float): QD-cavity couplings in units of g1.
        delta1, delta2 (float): QD-cavity detunings.
        kernel (PhononKernel): Shared bath kernel.

    Returns:
        RateSet: Cavity-family fields set, pump-family fields zero.
    """
    return RateSet(**_cavity_fields(_Family(kernel, (g1, g2), (delta1, delta2))))


def rates_coherent(g1: float, g2: float, eta1: float, eta2: float, delta1p: float, delta2p: float,
                   kernel: PhononKernel, delta_cp: float = 0.0) -> RateSet:
    """
    Phonon rates for coherent pumping in the frame of the pump.

    The cavity family rotates at Delta_ip - Delta_cp and the pump family (sigma_i^+
    with coupling eta_i) at Delta_ip. Cross terms mixing g and eta are dropped.
    """
    cavity = _cavity_fields(_Family(kernel, (g1, g2), (delta1p - delta_cp, delta2p - delta_cp)))
    pump = _Family(kernel, (eta1, eta2), (delta1p, delta2p))

    def by_role(pair: Pair) -> Pair:
        # pump fields are named after sigma_i^+ first, i.e. R before R^dag
        return pair[1], pair[0]

    sigsig = {}
    for i, k, j, l in SIGMA_CROSS_KEYS:
        sigsig[(i, k, j, l)] = pump.sandwich((i, k == "-"), (j, l == "-"))

    return RateSet(
        **cavity,
        delta_p_sigma_pm=(pump.shifts(1), pump.shifts(2)),
        omega_p_pp=pump.two_excitation(),
        omega_p_pm=pump.exchange(),
        gamma_p_sigma_pm=(by_role(pump.lindblad_rates(1)), by_role(pump.lindblad_rates(2))),
        gamma_p_sigsig=sigsig,
        omega_p_sigsig=(by_role(pump.self_sandwiches(1)), by_role(pump.self_sandwiches(2))),
    )
