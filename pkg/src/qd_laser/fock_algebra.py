from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Tuple, Union

import numpy as np

from .utils import QD_STATES, QD_PAIR_LABELS, COLLECTIVE_LABELS, HERMITIAN_TOL

Label = Tuple[str, str, int]


@dataclass(frozen=True)
class HilbertLayout:
    """
    Truncated product space QD1 (x) QD2 (x) Fock(0..n_max).

    Basis states are ordered (qd1, qd2, n) with n varying fastest and each dot
    ordered (g, e), so the photon-number sector of a QD pair is a strided slice.
    """
    n_max: int

    def __post_init__(self):
        if not isinstance(self.n_max, (int, np.integer)) or isinstance(self.n_max, bool):
            raise ValueError(f"n_max must be an integer, but got {self.n_max!r}.")
        if self.n_max < 0:
            raise ValueError(f"n_max must be non-negative, but got {self.n_max}.")

    @property
    def n_photon(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 4 * self.n_photon

    @cached_property
    def labels(self) -> Tuple[Label, ...]:
        return tuple((q1, q2, n) for q1 in QD_STATES for q2 in QD_STATES for n in range(self.n_photon))

    @cached_property
    def photon_numbers(self) -> np.ndarray:
        return np.tile(np.arange(self.n_photon), 4)

    @cached_property
    def pair_indices(self) -> np.ndarray:
        """Index into QD_PAIR_LABELS of every basis state."""
        return np.repeat(np.arange(4), self.n_photon)

    def index(self, qd1: str, qd2: str, n: int) -> int:
        if qd1 not in QD_STATES or qd2 not in QD_STATES:
            raise ValueError(f"QD labels must be one of {QD_STATES}, but got ({qd1}, {qd2}).")
        if not 0 <= n <= self.n_max:
            raise ValueError(f"Photon number {n} is outside 0..{self.n_max}.")
        pair = 2 * QD_STATES.index(qd1) + QD_STATES.index(qd2)
        return pair * self.n_photon + n

    def label(self, index: int) -> Label:
        return self.labels[index]

    def basis(self, qd1: str, qd2: str, n: int) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=complex)
        vec[self.index(qd1, qd2, n)] = 1.0
        return vec

    def pair_label(self, index: int) -> str:
        return QD_PAIR_LABELS[self.pair_indices[index]]


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """
    Dense operator on a HilbertLayout.

    Args:
        layout (HilbertLayout): The space the operator acts on.
        entries (np.ndarray): dim x dim complex matrix.
        hermitian (bool): When set, Hermiticity is verified on construction.
    """
    layout: HilbertLayout
    entries: np.ndarray
    hermitian: bool = False

    # numpy scalars defer to __rmul__
    __array_ufunc__ = None

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (self.layout.dim, self.layout.dim):
            raise ValueError(
                f"Operator shape {entries.shape} does not match layout dimension {self.layout.dim}.")
        object.__setattr__(self, "entries", entries)
        if self.hermitian:
            deviation = self.hermiticity_deviation()
            if deviation >= HERMITIAN_TOL:
                raise ValueError(f"Operator flagged Hermitian deviates from its adjoint by {deviation:.3e}.")

    def hermiticity_deviation(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0))

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.layout, self.entries.conj().T, self.hermitian)

    def expect(self, rho: np.ndarray) -> complex:
        return complex(np.trace(self.entries @ rho))

    def _check_layout(self, other: "OperatorMatrix"):
        if other.layout != self.layout:
            raise ValueError(f"Layouts differ: n_max={self.layout.n_max} vs n_max={other.layout.n_max}.")

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_layout(other)
        return OperatorMatrix(self.layout, self.entries @ other.entries)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_layout(other)
        return OperatorMatrix(self.layout, self.entries + other.entries)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_layout(other)
        return OperatorMatrix(self.layout, self.entries - other.entries)

    def __mul__(self, scalar: Union[complex, float]) -> "OperatorMatrix":
        return OperatorMatrix(self.layout, self.entries * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(self.layout, -self.entries)


def _embed(layout: HilbertLayout, qd1: np.ndarray, qd2: np.ndarray, cavity: np.ndarray) -> np.ndarray:
    return np.kron(np.kron(qd1, qd2), cavity)


def identity(layout: HilbertLayout) -> OperatorMatrix:
    return OperatorMatrix(layout, np.eye(layout.dim), hermitian=True)


def annihilation(layout: HilbertLayout) -> OperatorMatrix:
    """Cavity lowering operator a, identity on both dots."""
    ladder = np.diag(np.sqrt(np.arange(1, layout.n_photon)), k=1)
    return OperatorMatrix(layout, _embed(layout, np.eye(2), np.eye(2), ladder))


def creation(layout: HilbertLayout) -> OperatorMatrix:
    return annihilation(layout).dag()


def number(layout: HilbertLayout) -> OperatorMatrix:
    counts = np.diag(np.arange(layout.n_photon, dtype=float))
    return OperatorMatrix(layout, _embed(layout, np.eye(2), np.eye(2), counts), hermitian=True)


def qd_sigma(layout: HilbertLayout, which: int, kind: str) -> OperatorMatrix:
    """
    Raising or lowering operator of one dot.

    Args:
        layout (HilbertLayout): The product space.
        which (int): Dot index, 1 or 2.
        kind (str): "raise" for sigma^+ = |e><g|, "lower" for sigma^- = |g><e|.

    Returns:
        OperatorMatrix: sigma_which^{+/-} with identity on the other factors.
    """
    if which not in (1, 2):
        raise ValueError(f"Dot index must be 1 or 2, but got {which}.")
    if kind not in ("raise", "lower"):
        raise ValueError(f"kind must be 'raise' or 'lower', but got {kind!r}.")
    # basis order within a dot is (g, e)
    sigma = np.array([[0.0, 0.0], [1.0, 0.0]])
    if kind == "lower":
        sigma = sigma.T
    factors = (sigma, np.eye(2)) if which == 1 else (np.eye(2), sigma)
    return OperatorMatrix(layout, _embed(layout, factors[0], factors[1], np.eye(layout.n_photon)))


def collective_states() -> Dict[str, np.ndarray]:
    """The four collective two-dot states in the (gg, ge, eg, ee) pair basis."""
    s = 1.0 / np.sqrt(2.0)
    return {
        "ee": np.array([0.0, 0.0, 0.0, 1.0], dtype=complex),
        "plus": np.array([0.0, s, s, 0.0], dtype=complex),
        "minus": np.array([0.0, -s, s, 0.0], dtype=complex),
        "gg": np.array([1.0, 0.0, 0.0, 0.0], dtype=complex),
    }


def collective_projectors(layout: HilbertLayout) -> Dict[str, OperatorMatrix]:
    """
    Projectors onto |ee>, |+>, |->, |gg>, each summed over all photon numbers.
    |+-> = (|e1 g2> +- |g1 e2>)/sqrt(2).
    """
    projectors = {}
    for key, state in collective_states().items():
        pair_projector = np.outer(state, state.conj())
        projectors[key] = OperatorMatrix(
            layout, np.kron(pair_projector, np.eye(layout.n_photon)), hermitian=True)
    return {key: projectors[key] for key in COLLECTIVE_LABELS}


def collective_ket(layout: HilbertLayout, which: str, n: int) -> np.ndarray:
    """State vector |which> (x) |n> for a collective label in COLLECTIVE_LABELS."""
    if not 0 <= n <= layout.n_max:
        raise ValueError(f"Photon number {n} is outside 0..{layout.n_max}.")
    cavity = np.zeros(layout.n_photon, dtype=complex)
    cavity[n] = 1.0
    return np.kron(collective_states()[which], cavity)
