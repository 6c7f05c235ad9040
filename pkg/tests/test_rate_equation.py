from dataclasses import replace

import numpy as np
import pytest

from qd_laser.errors import NegativeRateError
from qd_laser.fock_algebra import HilbertLayout
from qd_laser.generators import ModelConfig, sme_generator
from qd_laser.rate_equation import dressed_resonance, excess_emission, reduce
from qd_laser.steady_state import solve_steady


@pytest.fixture
def single_emitter():
    return ModelConfig(n_max=4, g2=0.0, eta1=0.3, phonons_enabled=False)


@pytest.fixture
def phonon_sme(incoherent_config, warm_kernel):
    generator = sme_generator(incoherent_config, warm_kernel)
    return generator, solve_steady(generator)


def test_uncoupled_dots_emit_nothing(bare_kernel):
    config = ModelConfig(n_max=4, g1=0.0, g2=0.0, eta1=0.4, eta2=0.2, phonons_enabled=False)
    model = reduce(sme_generator(config, bare_kernel))
    np.testing.assert_allclose(model.alpha, 0.0, atol=1e-14)
    np.testing.assert_allclose(model.G, 0.0, atol=1e-14)
    np.testing.assert_allclose(model.Gamma, 0.0, atol=1e-14)
    report = excess_emission(model)
    assert all(value == pytest.approx(0.0, abs=1e-14) for value in report.excess.values())
    assert report.mean_n_sme == pytest.approx(0.0, abs=1e-12)
    assert model.negative_share == 0.0


def test_reduced_generator_conserves_probability(phonon_sme):
    generator, _ = phonon_sme
    model = reduce(generator)
    scale = max(np.max(np.abs(model.reduced_generator)), 1.0)
    np.testing.assert_allclose(model.column_sums(), 0.0, atol=1e-10 * scale)
    assert model.imag_residual < 1e-10 * scale
    assert model.balance_gap() < 1e-10
    assert model.pn.sum() == pytest.approx(1.0)
    assert model.G.shape == (4, 5, 4)


def test_reduced_stationary_vector_is_the_steady_state_diagonal(phonon_sme):
    generator, state = phonon_sme
    model = reduce(generator)
    np.testing.assert_allclose(model.diag_steady, state.pn_ab, atol=1e-8)


def test_excess_emission_adds_up_to_mean_photon_number(phonon_sme):
    generator, state = phonon_sme
    report = excess_emission(reduce(generator, m_max=4), sme_state=state)
    assert sorted(report.excess) == [1, 2, 3, 4]
    assert report.overflow_excess == pytest.approx(0.0, abs=1e-14)
    assert report.mean_n_rate_eq == pytest.approx(state.mean_n, abs=1e-8)
    assert report.relative_discrepancy < 1e-6
    assert report.excess[1] > 0.0


def test_truncated_orders_show_up_as_overflow(phonon_sme):
    generator, state = phonon_sme
    model = reduce(generator, m_max=2)
    report = excess_emission(model, sme_state=state)
    assert sorted(report.excess) == [1, 2]
    assert report.mean_n_rate_eq + report.overflow_excess == pytest.approx(state.mean_n, abs=1e-8)
    assert model.balance_gap() < 1e-10


def test_reduction_reports_negative_entries(single_emitter, bare_kernel):
    model = reduce(sme_generator(single_emitter, bare_kernel))
    assert 0.0 < model.negative_share < 1.0
    assert model.clamped == 0


def test_strict_reduction_rejects_negative_entries(single_emitter, bare_kernel):
    with pytest.raises(NegativeRateError) as excinfo:
        reduce(sme_generator(single_emitter, bare_kernel), negative_rate_tol=0.0)
    assert all(value < 0 for *_, value in excinfo.value.entries)


def test_loose_tolerance_clamps_negative_entries(single_emitter, bare_kernel):
    model = reduce(sme_generator(single_emitter, bare_kernel), negative_rate_tol=1e6)
    assert model.clamped > 0
    assert model.negative_share == 0.0
    assert np.all(model.G >= 0.0) and np.all(model.Gamma >= 0.0)


def test_reduce_validates_arguments(incoherent_config, bare_kernel):
    generator = sme_generator(replace(incoherent_config, phonons_enabled=False), bare_kernel)
    with pytest.raises(ValueError):
        reduce(generator, m_max=0)
    with pytest.raises(ValueError):
        reduce(generator, m_max=5)
    with pytest.raises(ValueError):
        reduce(generator, layout=HilbertLayout(6))
    with pytest.raises(ValueError):
        excess_emission(reduce(generator), kappa=0.0)


def test_dressed_resonance():
    assert dressed_resonance(13.5, 3.0) == pytest.approx(14.7733, rel=1e-5)
    assert dressed_resonance(13.5, 1.9) == pytest.approx(14.0246, rel=1e-5)
    assert dressed_resonance(13.5, 0.0) == 13.5
