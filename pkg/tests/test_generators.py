from dataclasses import replace

import numpy as np
import pytest

from qd_laser.fock_algebra import HilbertLayout, annihilation, collective_ket, creation, qd_sigma
from qd_laser.generators import (
    ModelConfig,
    Superoperator,
    bare_dissipators,
    build_generator,
    commutator,
    cross_dissipator,
    diagonal_hamiltonian,
    dressed_states,
    full_polaron_generator,
    lindblad_dissipator,
    phonon_superoperator,
    sandwich,
    sme_generator,
    system_hamiltonian,
    system_operators,
    unvec,
    vec,
)
from qd_laser.phonon import BathParams
from qd_laser.utils import FLAG_NO_EPI, FLAG_OMEGA_PLUS_FIX


def _random_density(dim, seed=0):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def _random_matrix(dim, seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))


def test_column_stacking_convention():
    layout = HilbertLayout(1)
    rho = _random_matrix(layout.dim, 1)
    np.testing.assert_array_equal(unvec(vec(rho), layout.dim), rho)
    a, b = _random_matrix(layout.dim, 2), _random_matrix(layout.dim, 3)
    np.testing.assert_allclose(np.kron(b.T, a) @ vec(rho), vec(a @ rho @ b), atol=1e-12)


def test_sandwich_and_commutator_act_as_written(layout):
    rho = _random_density(layout.dim)
    a, ad = annihilation(layout), creation(layout)
    out = sandwich(a, ad, 0.3 - 0.1j).apply(rho)
    np.testing.assert_allclose(out, (0.3 - 0.1j) * a.entries @ rho @ ad.entries, atol=1e-13)
    h = system_hamiltonian(ModelConfig(n_max=layout.n_max), 0.9)
    out = commutator(h).apply(rho)
    np.testing.assert_allclose(out, -1j * (h.entries @ rho - rho @ h.entries), atol=1e-12)


def test_lindblad_dissipator_preserves_trace_and_hermiticity(layout):
    rho = _random_density(layout.dim)
    op = qd_sigma(layout, 1, "lower") @ creation(layout)
    dissipator = lindblad_dissipator(op, 0.7)
    out = dissipator.apply(rho)
    assert abs(np.trace(out)) < 1e-12
    np.testing.assert_allclose(out, out.conj().T, atol=1e-12)
    assert dissipator.trace_deviation() < 1e-12
    with pytest.raises(ValueError):
        lindblad_dissipator(op, -0.1)


def test_cross_dissipator_reduces_to_lindblad(layout):
    op = qd_sigma(layout, 2, "raise") @ annihilation(layout)
    cross = cross_dissipator(op, op.dag(), 0.4)
    np.testing.assert_allclose(cross.toarray(), lindblad_dissipator(op, 0.4).toarray(), atol=1e-14)


def test_cross_dissipator_is_trace_preserving(layout):
    op1 = qd_sigma(layout, 1, "raise") @ annihilation(layout)
    op2 = creation(layout) @ qd_sigma(layout, 2, "lower")
    assert cross_dissipator(op1, op2, 0.2 + 0.05j).trace_deviation() < 1e-12


def test_superoperator_algebra_tracks_kappa_and_flags(layout):
    a = annihilation(layout)
    left_term = Superoperator(layout, lindblad_dissipator(a, 1.0).matrix, kappa=1.0, flags=("x",))
    total = left_term + Superoperator.zero(layout).with_flags("y", "x")
    assert total.kappa == 1.0
    assert total.flags == ("x", "y")
    assert (total - left_term).norm_max() == 0.0
    with pytest.raises(ValueError):
        left_term + Superoperator.zero(HilbertLayout(2))


def test_bare_dissipators_pump_only_when_incoherent():
    incoherent = ModelConfig(n_max=4, eta1=0.4, eta2=0.4)
    coherent = ModelConfig(pump_mode="coherent", n_max=4, eta1=0.4, eta2=0.4)
    layout = incoherent.layout
    assert bare_dissipators(incoherent).kappa == incoherent.kappa
    gap = bare_dissipators(incoherent).toarray() - bare_dissipators(coherent).toarray()
    pump = lindblad_dissipator(qd_sigma(layout, 1, "raise"), 0.4) \
        + lindblad_dissipator(qd_sigma(layout, 2, "raise"), 0.4)
    np.testing.assert_allclose(gap, pump.toarray(), atol=1e-14)


@pytest.mark.parametrize("engine", ["full", "sme"])
@pytest.mark.parametrize("config_name", ["incoherent_config", "coherent_config"])
def test_generators_preserve_trace_and_hermiticity(request, warm_kernel, engine, config_name):
    config = request.getfixturevalue(config_name)
    generator = build_generator(config, warm_kernel, engine)
    scale = max(generator.norm_max(), 1.0)
    assert generator.trace_deviation() < 1e-10 * scale
    for seed in range(2):
        out = generator.apply(_random_density(config.layout.dim, seed))
        np.testing.assert_allclose(out, out.conj().T, atol=1e-12 * scale)


def test_build_generator_rejects_unknown_engine(incoherent_config, warm_kernel):
    with pytest.raises(ValueError):
        build_generator(incoherent_config, warm_kernel, "exact")


@pytest.mark.parametrize("config_name", ["incoherent_config", "coherent_config"])
def test_engines_agree_without_phonons(request, warm_kernel, bare_kernel, config_name):
    config = replace(request.getfixturevalue(config_name), phonons_enabled=False)
    full = full_polaron_generator(config, warm_kernel)
    sme = sme_generator(config, warm_kernel)
    np.testing.assert_allclose(full.toarray(), sme.toarray(), atol=1e-14)
    assert FLAG_NO_EPI in full.flags and FLAG_NO_EPI in sme.flags

    bath_free = replace(config, phonons_enabled=True, bath=BathParams(alpha_p=0.0))
    np.testing.assert_allclose(full_polaron_generator(bath_free, bare_kernel).toarray(), full.toarray(), atol=1e-14)
    np.testing.assert_allclose(sme_generator(bath_free, bare_kernel).toarray(), full.toarray(), atol=1e-14)


def _diagonal_expansion(config, kernel):
    """Master equation whose phonon term is evaluated with the bare diagonal Hamiltonian."""
    expected = commutator(system_hamiltonian(config, kernel.B)) + bare_dissipators(config)
    families = [dict(include_pump=False)]
    if config.coherent:
        families.append(dict(include_cavity=False))
    h_diag = diagonal_hamiltonian(config)
    for family in families:
        x_g, x_u = system_operators(config, **family)
        expected = expected - phonon_superoperator(((x_g, "g"), (x_u, "u")), h_diag, kernel)
    return expected


@pytest.mark.parametrize("config", [
    ModelConfig(n_max=4, eta1=0.5, eta2=0.3, delta1=0.4, delta2=-0.3, bath=BathParams(temperature=5.0)),
    ModelConfig(n_max=4, g2=-1.0, eta1=0.5, eta2=0.5, bath=BathParams(temperature=5.0)),
    ModelConfig(pump_mode="coherent", n_max=4, eta1=0.8, eta2=0.6, delta1p=-1.5, delta2p=-1.2,
                delta_cp=0.5, bath=BathParams(temperature=5.0)),
])
def test_sme_equals_diagonal_hamiltonian_expansion(warm_kernel, config):
    sme = sme_generator(config, warm_kernel)
    expected = _diagonal_expansion(config, warm_kernel)
    scale = max(expected.norm_max(), 1.0)
    np.testing.assert_allclose(sme.toarray(), expected.toarray(), atol=1e-10 * scale)


def test_sme_flags_the_coherent_exchange(coherent_config, warm_kernel):
    assert FLAG_OMEGA_PLUS_FIX in sme_generator(coherent_config, warm_kernel).flags
    assert FLAG_OMEGA_PLUS_FIX not in sme_generator(replace(coherent_config, phonons_enabled=False), warm_kernel).flags


def test_full_generator_differs_from_sme_with_phonons(incoherent_config, warm_kernel):
    full = full_polaron_generator(incoherent_config, warm_kernel)
    sme = sme_generator(incoherent_config, warm_kernel)
    assert np.max(np.abs(full.toarray() - sme.toarray())) > 1e-6


def test_system_hamiltonian_is_hermitian_with_drive(coherent_config):
    h = system_hamiltonian(coherent_config, 0.9)
    assert h.hermiticity_deviation() < 1e-15
    layout = coherent_config.layout
    # cavity detuning sits on the photon number
    idx = layout.index("g", "g", 2)
    assert h.entries[idx, idx] == pytest.approx(2 * coherent_config.delta_cp)
    drive = h.entries[layout.index("e", "g", 0), layout.index("g", "g", 0)]
    assert drive == pytest.approx(0.9 * coherent_config.eta1)


def test_dressed_states_are_eigenstates():
    B = 0.9
    config = ModelConfig(n_max=5)
    h = system_hamiltonian(config, B).entries
    states = dressed_states(config.layout, 1.0, B)
    assert list(states) == ["psi1+", "psi1-", "psi2_0", "psi2+", "psi2-", "psi3_0", "psi3+", "psi3-"]
    for energy, vector in states.values():
        assert np.linalg.norm(vector) == pytest.approx(1.0)
        np.testing.assert_allclose(h @ vector, energy * vector, atol=1e-12)
    assert states["psi1+"][0] == pytest.approx(np.sqrt(2.0) * B)
    assert states["psi2-"][0] == pytest.approx(-np.sqrt(6.0) * B)
    assert states["psi3+"][0] == pytest.approx(np.sqrt(10.0) * B)


def test_dark_state_decouples_for_symmetric_coupling(layout):
    h = system_hamiltonian(ModelConfig(n_max=layout.n_max), 1.0).entries
    dark = collective_ket(layout, "minus", 0)
    np.testing.assert_allclose(h @ dark, 0.0, atol=1e-14)


def test_dressed_states_need_three_photons():
    with pytest.raises(ValueError):
        dressed_states(HilbertLayout(2))


@pytest.mark.parametrize("kwargs", [
    dict(kappa=0.0),
    dict(gamma1=-0.1),
    dict(n_max=3),
    dict(pump_mode="pulsed"),
    dict(delta1p=0.5),
    dict(pump_mode="coherent", delta1=0.5),
    dict(g2=float("inf")),
])
def test_model_config_validation(kwargs):
    with pytest.raises(ValueError):
        ModelConfig(**kwargs)
