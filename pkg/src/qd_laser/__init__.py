from .fock_algebra import HilbertLayout, OperatorMatrix
from .phonon import BathParams, PhononKernel, RateSet, rates_incoherent, rates_coherent
from .generators import ModelConfig, Superoperator, full_polaron_generator, sme_generator
from .steady_state import SteadyState, solve_steady, evolve, observables, converge_n_max
from .rate_equation import PhotonRateModel, EmissionReport, reduce, excess_emission, dressed_resonance
