"""
Channel value types.
"""

from dataclasses import dataclass

import numpy as np

from core.models import frozen


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """
    Kraus form Phi(rho) = sum_i V_i rho V_i*.

    ``non_tp`` marks maps built without the trace-preservation check (sub-TP
    CP maps, adjoints of non-unital channels).
    """
    dim: int
    kraus: tuple
    tp_tol: float = 1e-10
    non_tp: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'kraus', tuple(frozen(V) for V in self.kraus))

    def __len__(self):
        return len(self.kraus)

    def __iter__(self):
        return iter(self.kraus)

    @property
    def stacked(self):
        """Kraus operators as an (n, d, d) array."""
        return np.stack(self.kraus)


@dataclass(frozen=True)
class ChannelReport:
    trace_preserving: bool
    unital: bool
    tp_residual: float
    unital_residual: float

    def as_dict(self):
        return {
            'trace_preserving': self.trace_preserving,
            'unital': self.unital,
            'tp_residual': self.tp_residual,
            'unital_residual': self.unital_residual,
        }
