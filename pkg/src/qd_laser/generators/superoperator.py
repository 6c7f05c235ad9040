from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
import scipy.sparse as sp

from ..fock_algebra import HilbertLayout, OperatorMatrix

# vec(rho) stacks columns: vec(A rho B) = (B^T kron A) vec(rho)
VECTORIZATION = "column"


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(vector: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(vector).reshape(dim, dim, order="F")


def trace_row(layout: HilbertLayout) -> sp.csr_matrix:
    """Row vector t with t @ vec(rho) = tr(rho)."""
    dim = layout.dim
    cols = np.arange(dim) * (dim + 1)
    return sp.csr_matrix((np.ones(dim), (np.zeros(dim, dtype=int), cols)), shape=(1, dim * dim))


@dataclass(frozen=True, eq=False)
class Superoperator:
    """
    Sparse generator acting on column-stacked density matrices.

    Args:
        layout (HilbertLayout): The Hilbert space of rho.
        matrix (sp.csr_matrix): D^2 x D^2 complex matrix.
        kappa (float): Cavity decay rate contained in the generator, used by the rate-equation reduction.
        flags (tuple): Provenance tags carried into result rows.
    """
    layout: HilbertLayout
    matrix: sp.csr_matrix
    kappa: float = 0.0
    flags: Tuple[str, ...] = ()

    def __post_init__(self):
        size = self.layout.dim ** 2
        matrix = sp.csr_matrix(self.matrix, dtype=complex)
        if matrix.shape != (size, size):
            raise ValueError(f"Superoperator shape {matrix.shape} does not match ({size}, {size}).")
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def zero(cls, layout: HilbertLayout) -> "Superoperator":
        size = layout.dim ** 2
        return cls(layout, sp.csr_matrix((size, size), dtype=complex))

    @property
    def vectorization(self) -> str:
        return VECTORIZATION

    def _combine(self, other: "Superoperator", sign: float) -> "Superoperator":
        if other.layout != self.layout:
            raise ValueError(f"Layouts differ: n_max={self.layout.n_max} vs n_max={other.layout.n_max}.")
        flags = self.flags + tuple(f for f in other.flags if f not in self.flags)
        return Superoperator(self.layout, self.matrix + sign * other.matrix, self.kappa + sign * other.kappa, flags)

    def __add__(self, other: "Superoperator") -> "Superoperator":
        return self._combine(other, 1.0)

    def __sub__(self, other: "Superoperator") -> "Superoperator":
        return self._combine(other, -1.0)

    def __neg__(self) -> "Superoperator":
        return Superoperator(self.layout, -self.matrix, -self.kappa, self.flags)

    def with_flags(self, *flags: str) -> "Superoperator":
        extra = tuple(f for f in flags if f not in self.flags)
        return Superoperator(self.layout, self.matrix, self.kappa, self.flags + extra)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.layout.dim)

    def trace_deviation(self) -> float:
        """Largest entry of t @ L; zero for a trace-preserving generator."""
        row = trace_row(self.layout) @ self.matrix
        return float(np.max(np.abs(row.toarray()), initial=0.0))

    def norm_max(self) -> float:
        return float(np.max(np.abs(self.matrix.data), initial=0.0))

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _dense(op: Union[OperatorMatrix, np.ndarray]) -> np.ndarray:
    return op.entries if isinstance(op, OperatorMatrix) else np.asarray(op, dtype=complex)


def _layout(*ops: OperatorMatrix) -> HilbertLayout:
    layout = ops[0].layout
    for op in ops[1:]:
        if op.layout != layout:
            raise ValueError(f"Layouts differ: n_max={layout.n_max} vs n_max={op.layout.n_max}.")
    return layout


def left(layout: HilbertLayout, op) -> sp.csr_matrix:
    """rho -> A rho."""
    return sp.kron(sp.identity(layout.dim, format="csr"), sp.csr_matrix(_dense(op)), format="csr")


def right(layout: HilbertLayout, op) -> sp.csr_matrix:
    """rho -> rho B."""
    return sp.kron(sp.csr_matrix(_dense(op).T), sp.identity(layout.dim, format="csr"), format="csr")


def two_sided(op_left, op_right) -> sp.csr_matrix:
    """rho -> A rho B."""
    return sp.kron(sp.csr_matrix(_dense(op_right).T), sp.csr_matrix(_dense(op_left)), format="csr")


def commutator(hamiltonian: OperatorMatrix) -> Superoperator:
    """rho -> -i [H, rho]."""
    layout = hamiltonian.layout
    return Superoperator(layout, -1j * (left(layout, hamiltonian) - right(layout, hamiltonian)))


def lindblad_dissipator(op: OperatorMatrix, rate: float) -> Superoperator:
    """
    rho -> -(rate / 2) (O^dag O rho - 2 O rho O^dag + rho O^dag O).
    """
    layout = op.layout
    if rate == 0:
        return Superoperator.zero(layout)
    if rate < 0:
        raise ValueError(f"Lindblad rate must be non-negative, but got {rate}.")
    odo = op.dag() @ op
    matrix = left(layout, odo) - 2.0 * two_sided(op, op.dag()) + right(layout, odo)
    return Superoperator(layout, -0.5 * rate * matrix)


def cross_dissipator(op1: OperatorMatrix, op2: OperatorMatrix, rate: complex) -> Superoperator:
    """
    rho -> -(rate / 2) (O2 O1 rho - 2 O1 rho O2 + rho O2 O1).

    Only the sum with the partner term L[O2^dag, O1^dag] at conj(rate) keeps rho Hermitian.
    """
    layout = _layout(op1, op2)
    if rate == 0:
        return Superoperator.zero(layout)
    product = op2 @ op1
    matrix = left(layout, product) - 2.0 * two_sided(op1, op2) + right(layout, product)
    return Superoperator(layout, -0.5 * rate * matrix)


def sandwich(op_left: OperatorMatrix, op_right: OperatorMatrix, coefficient: complex) -> Superoperator:
    """rho -> coefficient * A rho B."""
    layout = _layout(op_left, op_right)
    if coefficient == 0:
        return Superoperator.zero(layout)
    return Superoperator(layout, coefficient * two_sided(op_left, op_right))
