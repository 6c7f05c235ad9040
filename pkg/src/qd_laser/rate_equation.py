import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from scipy.sparse.linalg import splu

from .errors import NegativeRateError, ReductionError
from .fock_algebra import HilbertLayout, annihilation
from .generators import Superoperator, lindblad_dissipator
from .steady_state import SteadyState
from .utils import DEFAULT_M_MAX

logging.basicConfig(
    format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
    datefmt="%m/%d/%Y %H:%M:%S",
    level=logging.INFO,
)
logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PhotonRateModel:
    """
    Photon-number rate equation obtained by eliminating all coherences.

    Arrays over states are indexed [pair, n] with pairs ordered (gg, ge, eg, ee);
    G and Gamma carry a trailing axis for k = 1..m_max.
    """
    layout: HilbertLayout
    m_max: int
    kappa: float
    alpha: np.ndarray
    G: np.ndarray
    Gamma: np.ndarray
    redistribution: np.ndarray
    overflow: np.ndarray
    overflow_moment: np.ndarray
    reduced_generator: np.ndarray
    diag_steady: np.ndarray
    imag_residual: float = 0.0
    negative_share: float = 0.0
    clamped: int = 0

    @property
    def pn(self) -> np.ndarray:
        return self.diag_steady.sum(axis=0)

    def column_sums(self) -> np.ndarray:
        return self.reduced_generator.sum(axis=0)

    def balance_gap(self) -> float:
        """Relative mismatch of sum alpha P against sum (Gamma + G) P plus the overflow flux."""
        p = self.diag_steady
        outflow = float(np.sum(self.alpha * p))
        inflow = float(np.sum((self.G + self.Gamma).sum(axis=-1) * p) + np.sum(self.overflow * p))
        return abs(outflow - inflow) / max(abs(outflow), 1e-300)

    def overflow_fraction(self) -> float:
        """Share of the photon-changing stationary flux carried by |k| > m_max."""
        p = self.diag_steady
        total = float(np.sum(self.alpha * p))
        return float(np.sum(self.overflow * p)) / total if total > 0 else 0.0


@dataclass(frozen=True)
class EmissionReport:
    excess: Dict[int, float]
    mean_n_rate_eq: float
    mean_n_sme: float
    discrepancy: float
    overflow_excess: float = 0.0
    relative_discrepancy: float = field(init=False)

    def __post_init__(self):
        scale = abs(self.mean_n_sme)
        object.__setattr__(self, "relative_discrepancy", abs(self.discrepancy) / scale if scale > 0 else 0.0)


def _diagonal_partition(dim: int):
    flat = np.arange(dim * dim)
    diagonal = np.arange(dim) * (dim + 1)
    mask = np.ones(dim * dim, dtype=bool)
    mask[diagonal] = False
    return diagonal, flat[mask]


def _stationary(matrix: np.ndarray, anchor: int = 0) -> np.ndarray:
    system = matrix.copy()
    system[anchor, :] = 1.0
    rhs = np.zeros(matrix.shape[0])
    rhs[anchor] = 1.0
    try:
        return np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as e:
        raise ReductionError(f"Reduced generator has no unique stationary vector: {e}") from e


def reduce(generator: Superoperator, layout: Optional[HilbertLayout] = None, m_max: int = DEFAULT_M_MAX,
           negative_rate_tol: Optional[float] = None) -> PhotonRateModel:
    """
    Scully-Lamb reduction of a generator to a rate equation on the diagonal elements.

    The vectorized space is split into diagonal elements d and coherences c. Setting
    dc/dt = 0 gives L_eff = L_dd - L_dc L_cc^-1 L_cd. The cavity-loss part of L_eff is
    removed before the remaining off-diagonal entries are sorted by the photon-number
    shift k = n_to - n_from into emission (k > 0), absorption (k < 0), label
    redistribution (k = 0) and overflow (|k| > m_max).

    Parameters:
    - generator: The generator to reduce; its kappa attribute is the loss rate to remove.
    - layout: Expected Hilbert layout, defaults to the generator's.
    - m_max: Largest multi-photon order kept.
    - negative_rate_tol: When given, negative entries down to -negative_rate_tol are clamped to
      zero and anything below raises. When None, negative entries are kept and their share of
      the stationary flux is reported as negative_share. Cavity loss carries coherences
      |e,n+1><g,n+2| down to |e,n><g,n+1|, so the exact complement has negative entries
      whenever kappa and the QD-cavity coupling are both nonzero.

    Returns:
    - A PhotonRateModel.

    Raises:
    - ReductionError: If the coherence block is singular.
    - NegativeRateError: If an extracted rate is more negative than the tolerance.
    """
    layout = generator.layout if layout is None else layout
    if layout != generator.layout:
        raise ValueError(f"Layout n_max={layout.n_max} does not match the generator's {generator.layout.n_max}.")
    if not 1 <= m_max <= layout.n_max:
        raise ValueError(f"m_max must lie in 1..{layout.n_max}, but got {m_max}.")

    dim = layout.dim
    d_idx, c_idx = _diagonal_partition(dim)
    matrix = generator.matrix.tocsr()
    l_dd = matrix[d_idx][:, d_idx].toarray()
    l_dc = matrix[d_idx][:, c_idx]
    l_cd = matrix[c_idx][:, d_idx].toarray()
    l_cc = matrix[c_idx][:, c_idx].tocsc()
    try:
        coherences = splu(l_cc).solve(l_cd)
    except RuntimeError as e:
        raise ReductionError(f"Coherence block is singular: {e}") from e

    effective = l_dd - l_dc @ coherences
    imag_residual = float(np.max(np.abs(effective.imag), initial=0.0))
    effective = np.real(effective)
    diag_steady = _stationary(effective).reshape(4, layout.n_photon)

    kappa_block = lindblad_dissipator(annihilation(layout), generator.kappa).matrix
    rates = effective - np.real(kappa_block[d_idx][:, d_idx].toarray())

    photons = layout.photon_numbers
    shift = photons[:, None] - photons[None, :]
    off_diagonal = ~np.eye(dim, dtype=bool)

    negative = off_diagonal & (rates < 0)
    clamped = 0
    if negative_rate_tol is not None:
        severe = negative & (rates < -negative_rate_tol)
        if np.any(severe):
            rows, cols = np.nonzero(severe)
            entries = [(layout.pair_label(c), int(photons[c]), int(shift[r, c]), float(rates[r, c]))
                       for r, c in zip(rows, cols)]
            raise NegativeRateError("Reduction produced negative rates", entries)
        clamped = int(np.sum(negative))
        if clamped:
            logger.warning(f"Clamped {clamped} negative rates above -{negative_rate_tol:.0e} to zero.")
        rates = np.where(negative, 0.0, rates)

    flows = np.where(off_diagonal, rates, 0.0)
    stationary_flux = np.abs(flows) * np.clip(diag_steady.ravel(), 0.0, None)[None, :]
    total_flux = float(np.sum(stationary_flux))
    negative_share = float(np.sum(np.where(flows < 0, stationary_flux, 0.0)) / total_flux) if total_flux > 0 else 0.0
    G = np.zeros((dim, m_max))
    Gamma = np.zeros((dim, m_max))
    for k in range(1, m_max + 1):
        G[:, k - 1] = np.sum(np.where(shift == k, flows, 0.0), axis=0)
        Gamma[:, k - 1] = np.sum(np.where(shift == -k, flows, 0.0), axis=0)
    beyond = np.abs(shift) > m_max
    overflow = np.sum(np.where(beyond, flows, 0.0), axis=0)
    overflow_moment = np.sum(np.where(beyond, shift * flows, 0.0), axis=0)
    redistribution = np.where(shift == 0, flows, 0.0)
    alpha = np.sum(np.where(shift != 0, flows, 0.0), axis=0)

    by_state = (4, layout.n_photon)
    return PhotonRateModel(
        layout=layout,
        m_max=m_max,
        kappa=generator.kappa,
        alpha=alpha.reshape(by_state),
        G=G.reshape(by_state + (m_max,)),
        Gamma=Gamma.reshape(by_state + (m_max,)),
        redistribution=redistribution,
        overflow=overflow.reshape(by_state),
        overflow_moment=overflow_moment.reshape(by_state),
        reduced_generator=effective,
        diag_steady=diag_steady,
        imag_residual=imag_residual,
        negative_share=negative_share,
        clamped=clamped,
    )


def excess_emission(model: PhotonRateModel, kappa: Optional[float] = None,
                    sme_state: Optional[SteadyState] = None) -> EmissionReport:
    """
    Split <n> into k-photon excess emission, sum_{ab,n} k (G^(k) - Gamma^(k)) P_n^{ab} / kappa.

    Args:
        model (PhotonRateModel): The reduced model.
        kappa (float, optional): Cavity loss rate, defaults to the model's.
        sme_state (SteadyState, optional): Steady state of the unreduced generator for comparison;
            without it <n> is read from the reduced stationary vector.

    Returns:
        EmissionReport: Excess per k, their sum and the comparison with <n>.
    """
    kappa = model.kappa if kappa is None else kappa
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, but got {kappa}.")
    p = model.diag_steady
    excess = {}
    for k in range(1, model.m_max + 1):
        net = model.G[..., k - 1] - model.Gamma[..., k - 1]
        excess[k] = float(k * np.sum(net * p) / kappa)
    mean_n_rate_eq = float(sum(excess.values()))
    if sme_state is not None:
        mean_n_sme = sme_state.mean_n
    else:
        mean_n_sme = float(np.dot(np.arange(model.layout.n_photon), model.pn))
    overflow_excess = float(np.sum(model.overflow_moment * p) / kappa)
    return EmissionReport(
        excess=excess,
        mean_n_rate_eq=mean_n_rate_eq,
        mean_n_sme=mean_n_sme,
        discrepancy=mean_n_rate_eq - mean_n_sme,
        overflow_excess=overflow_excess,
    )


def dressed_resonance(delta_p: float, eta: float) -> float:
    """Splitting of the pump-dressed QD states, sqrt(delta_p^2 + 4 eta^2)."""
    return float(np.sqrt(delta_p ** 2 + 4.0 * eta ** 2))
