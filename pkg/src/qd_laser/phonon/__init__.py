from .kernel import (
    BathParams,
    PhononKernel,
    spectral_density,
    phi,
    phi_imag_closed_form,
    phi0_zero_temperature,
    franck_condon,
    franck_condon_table,
    calibrate_g1_abs,
    greens,
    half_fourier,
    null_kernel,
    refinement_gaps,
)
from .rates import RateSet, rates_incoherent, rates_coherent

__all__ = [
    "BathParams",
    "PhononKernel",
    "spectral_density",
    "phi",
    "phi_imag_closed_form",
    "phi0_zero_temperature",
    "franck_condon",
    "franck_condon_table",
    "calibrate_g1_abs",
    "greens",
    "half_fourier",
    "null_kernel",
    "refinement_gaps",
    "RateSet",
    "rates_incoherent",
    "rates_coherent",
]
