"""
Stationarity value types.
"""

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from core.exceptions import ParameterError
from core.models import PositiveOperator, frozen

VERDICTS = ('positive_recurrent_evidence', 'inconclusive', 'fails')


@dataclass(frozen=True, eq=False)
class FirstReturnOperators:
    """
    S^T_{rho_x, j} for T = 1..horizon along paths that avoid ``origin`` at
    times 1..T-1.

    Only the aggregates are always kept: the arrivals at the origin per T,
    the per-site sums over T and the total trace per T. ``S`` holds every
    nonzero operator as {(T, site): PositiveOperator} when the run was asked
    to keep them.
    """
    origin: int
    seed: np.ndarray
    horizon: int
    lo: int
    returns: np.ndarray
    occupation: np.ndarray
    step_traces: np.ndarray
    tail_mass: float
    S: dict = None

    def __post_init__(self):
        object.__setattr__(self, 'seed', frozen(self.seed))
        object.__setattr__(self, 'returns', frozen(self.returns))
        object.__setattr__(self, 'occupation', frozen(self.occupation))
        object.__setattr__(self, 'step_traces', frozen(self.step_traces, dtype=float))

    @property
    def return_traces(self):
        """tr S^T_{rho_x, x} for T = 1..horizon."""
        return np.einsum('tii->t', self.returns).real

    @property
    def returned_mass(self):
        return float(self.return_traces.sum())

    @property
    def return_sum(self):
        """sum_T S^T_{rho_x, x}."""
        return self.returns.sum(axis=0)

    def operator(self, T, site):
        if self.S is None:
            raise ParameterError("Operators were not kept; rerun with keep=True")
        return self.S.get((T, site), PositiveOperator(mat=np.zeros_like(self.seed)))


@dataclass(frozen=True, eq=False)
class StationaryOperator:
    """
    Block operator sum_j rho_j kron |j><j| on a window starting at ``lo``.

    ``tail_mass`` and ``horizon`` are set when the operator is a truncated sum.
    """
    lo: int
    blocks: np.ndarray
    normalized: bool = False
    tail_mass: float = 0.0
    horizon: int = None

    def __post_init__(self):
        object.__setattr__(self, 'blocks', frozen(self.blocks))

    @property
    def hi(self):
        return self.lo + len(self.blocks) - 1

    @property
    def traces(self):
        return np.einsum('sii->s', self.blocks).real

    @property
    def trace_sum(self):
        return float(self.traces.sum())

    def block(self, site):
        s = site - self.lo
        if 0 <= s < len(self.blocks):
            return self.blocks[s]
        return np.zeros(self.blocks.shape[1:], dtype=complex)

    def trace_frame(self):
        return pd.DataFrame({'site': np.arange(self.lo, self.hi + 1), 'trace': self.traces})


@dataclass(frozen=True)
class PositiveRecurrenceReport:
    origin: int
    horizon: int
    trace_sum: float
    trace_sum_converged: bool
    last_decade_increment: float
    returned_mass: float
    fixed_point_residual: float
    tail_mass: float
    verdict: str

    def as_dict(self):
        return {
            'origin': self.origin,
            'horizon': self.horizon,
            'trace_sum': self.trace_sum,
            'trace_sum_converged': self.trace_sum_converged,
            'last_decade_increment': self.last_decade_increment,
            'returned_mass': self.returned_mass,
            'fixed_point_residual': self.fixed_point_residual,
            'tail_mass': self.tail_mass,
            'verdict': self.verdict,
        }


@dataclass(frozen=True, eq=False)
class CommunicationStructure:
    """
    Accessibility between window sites. ``reach[a, b]`` is i -> j for
    i = lo + a, j = lo + b; ``classes`` are the strongly connected components.
    """
    lo: int
    reach: np.ndarray
    classes: list
    irreducible: bool
    mode: str
    family: list = field(default_factory=list)

    def accessible(self, i, j):
        return bool(self.reach[i - self.lo, j - self.lo])

    def as_dict(self):
        sites = range(self.lo, self.lo + len(self.reach))
        return {
            'mode': self.mode,
            'irreducible': self.irreducible,
            'classes': self.classes,
            'reach': {str(i): [j for j in sites if self.accessible(i, j)] for i in sites},
            'family': self.family,
        }
