import numpy as np
import pytest

from qd_laser.fock_algebra import (
    HilbertLayout,
    OperatorMatrix,
    annihilation,
    collective_ket,
    collective_projectors,
    creation,
    identity,
    number,
    qd_sigma,
)


def test_layout_ordering_puts_photon_number_fastest():
    layout = HilbertLayout(3)
    assert layout.dim == 16
    assert layout.labels[0] == ("g", "g", 0)
    assert layout.labels[1] == ("g", "g", 1)
    assert layout.labels[4] == ("g", "e", 0)
    assert layout.index("e", "g", 2) == 2 * 4 + 2
    assert layout.pair_label(layout.index("e", "e", 3)) == "ee"
    for i, label in enumerate(layout.labels):
        assert layout.index(*label) == i


@pytest.mark.parametrize("n_max", [-1, 2.5, True])
def test_layout_rejects_bad_truncation(n_max):
    with pytest.raises(ValueError):
        HilbertLayout(n_max)


def test_index_rejects_out_of_range_photons():
    with pytest.raises(ValueError):
        HilbertLayout(2).index("g", "g", 3)


def test_ladder_operators(layout):
    a, ad, n = annihilation(layout), creation(layout), number(layout)
    np.testing.assert_allclose((ad @ a).entries, n.entries, atol=1e-14)
    commutator = (a @ ad - ad @ a).entries
    # [a, a^dag] = 1 except at the truncation edge
    edge = layout.photon_numbers == layout.n_max
    np.testing.assert_allclose(np.diag(commutator)[~edge], 1.0)
    np.testing.assert_allclose(np.diag(commutator)[edge], -layout.n_max)


def test_qd_sigma_acts_on_one_dot(layout):
    up1 = qd_sigma(layout, 1, "raise")
    down1 = qd_sigma(layout, 1, "lower")
    ket = layout.basis("g", "e", 2)
    np.testing.assert_allclose(up1.entries @ ket, layout.basis("e", "e", 2))
    np.testing.assert_allclose(down1.entries @ ket, 0.0)
    up2 = qd_sigma(layout, 2, "raise")
    np.testing.assert_allclose(up2.entries @ layout.basis("e", "g", 1), layout.basis("e", "e", 1))
    np.testing.assert_allclose((up1 @ up2 - up2 @ up1).entries, 0.0)


def test_qd_sigma_validates_arguments(layout):
    with pytest.raises(ValueError):
        qd_sigma(layout, 3, "raise")
    with pytest.raises(ValueError):
        qd_sigma(layout, 1, "up")


def test_collective_projectors_resolve_identity(layout):
    projectors = collective_projectors(layout)
    assert tuple(projectors) == ("ee", "plus", "minus", "gg")
    total = sum((p.entries for p in projectors.values()), np.zeros((layout.dim, layout.dim)))
    np.testing.assert_allclose(total, identity(layout).entries, atol=1e-14)
    for p in projectors.values():
        np.testing.assert_allclose((p @ p).entries, p.entries, atol=1e-14)


def test_collective_ket_symmetric_combination(layout):
    plus = collective_ket(layout, "plus", 1)
    expected = (layout.basis("e", "g", 1) + layout.basis("g", "e", 1)) / np.sqrt(2.0)
    np.testing.assert_allclose(plus, expected)
    minus = collective_ket(layout, "minus", 0)
    expected = (layout.basis("e", "g", 0) - layout.basis("g", "e", 0)) / np.sqrt(2.0)
    np.testing.assert_allclose(minus, expected)


def test_operator_matrix_checks_hermiticity_and_shape(layout):
    with pytest.raises(ValueError):
        OperatorMatrix(layout, annihilation(layout).entries, hermitian=True)
    with pytest.raises(ValueError):
        OperatorMatrix(layout, np.eye(3))
    with pytest.raises(ValueError):
        annihilation(layout) @ annihilation(HilbertLayout(5))


def test_numpy_scalars_scale_operators(layout):
    scaled = np.float64(2.0) * number(layout)
    assert isinstance(scaled, OperatorMatrix)
    np.testing.assert_allclose(scaled.entries, 2.0 * number(layout).entries)
