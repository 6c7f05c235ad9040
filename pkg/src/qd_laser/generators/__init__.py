from .config import ModelConfig
from .superoperator import (
    Superoperator,
    commutator,
    cross_dissipator,
    lindblad_dissipator,
    sandwich,
    trace_row,
    vec,
    unvec,
)
from .hamiltonian import dressed_states, system_hamiltonian, system_operators, diagonal_hamiltonian
from .polaron import bare_dissipators, full_polaron_generator, phonon_superoperator
from .simplified import effective_hamiltonian, model_rates, sme_generator

__all__ = [
    "ModelConfig",
    "Superoperator",
    "commutator",
    "cross_dissipator",
    "lindblad_dissipator",
    "sandwich",
    "trace_row",
    "vec",
    "unvec",
    "dressed_states",
    "system_hamiltonian",
    "system_operators",
    "diagonal_hamiltonian",
    "bare_dissipators",
    "full_polaron_generator",
    "phonon_superoperator",
    "effective_hamiltonian",
    "model_rates",
    "sme_generator",
    "GENERATOR_BUILDERS",
    "build_generator",
]

GENERATOR_BUILDERS = {
    "full": full_polaron_generator,
    "sme": sme_generator,
}


def build_generator(config: ModelConfig, kernel, engine: str) -> Superoperator:
    if engine not in GENERATOR_BUILDERS:
        raise ValueError(f"engine must be one of {tuple(GENERATOR_BUILDERS)}, but got {engine!r}.")
    return GENERATOR_BUILDERS[engine](config, kernel)
