from typing import Optional, Sequence, Tuple


class QdLaserError(Exception):
    """
    Base class for numerical and input failures that a sweep records per point
    instead of aborting.
    """


class QuadratureError(QdLaserError):
    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


class KernelTailError(QdLaserError):
    def __init__(self, message: str, bound: float):
        super().__init__(f"{message} (tail bound |phi(tau_max)|/|phi(0)| = {bound:.3e})")
        self.bound = bound


class EigenDecompositionError(QdLaserError):
    pass


class SteadyStateError(QdLaserError):
    def __init__(self, message: str, null_dim: Optional[int] = None):
        if null_dim is not None:
            message = f"{message} (estimated null-space dimension {null_dim})"
        super().__init__(message)
        self.null_dim = null_dim


class IntegrationError(QdLaserError):
    def __init__(self, message: str, t_reached: float):
        super().__init__(f"{message} (reached t = {t_reached:.6g})")
        self.t_reached = t_reached


class ConvergenceError(QdLaserError):
    def __init__(self, message: str, trend: Sequence[Tuple[int, float]]):
        history = ", ".join(f"n_max={n}: <n>={m:.6g}" for n, m in trend)
        super().__init__(f"{message} [{history}]")
        self.trend = list(trend)


class ReductionError(QdLaserError):
    pass


class NegativeRateError(ReductionError):
    def __init__(self, message: str, entries: Sequence[Tuple[str, int, int, float]]):
        worst = min(entries, key=lambda e: e[3])
        super().__init__(
            f"{message}: {len(entries)} entries, most negative {worst[3]:.3e} "
            f"from label {worst[0]} n={worst[1]} with shift k={worst[2]}")
        self.entries = list(entries)


class ScenarioError(QdLaserError, ValueError):
    pass
