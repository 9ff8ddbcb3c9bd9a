"""
PQ value types.
"""

from dataclasses import dataclass, field

import numpy as np

from core.models import frozen


@dataclass(frozen=True, eq=False)
class PQDecomposition:
    """
    Classical part ``P`` (d x d, columns summing to 1) and Q-blocks of a
    d^2 x d^2 representation.

    ``Qblocks[i, j]`` is the d x d block between the i-th and j-th runs of
    off-diagonal coordinates, so for d = 2 there is a single block
    [[q11, q12], [conj(q12), conj(q11)]].
    """
    dim: int
    P: np.ndarray
    Qblocks: np.ndarray
    residual: float
    stochastic_residual: float = 0.0
    pq: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'P', frozen(self.P, dtype=float))
        object.__setattr__(self, 'Qblocks', frozen(self.Qblocks))

    @property
    def Q(self):
        """The Q-block operator on the d(d-1) off-diagonal coordinates."""
        d = self.dim
        return np.block([[self.Qblocks[i, j] for j in range(d - 1)] for i in range(d - 1)])

    @property
    def q11(self):
        return complex(self.Qblocks[0, 0][0, 0])

    @property
    def q12(self):
        return complex(self.Qblocks[0, 0][0, 1])

    @property
    def markov(self):
        """All Q-blocks vanish."""
        return not np.any(self.Qblocks)

    def as_dict(self):
        return {
            'pq': self.pq,
            'dim': self.dim,
            'P': self.P.tolist(),
            'Qblocks_re': self.Qblocks.real.tolist(),
            'Qblocks_im': self.Qblocks.imag.tolist(),
            'residual': self.residual,
            'stochastic_residual': self.stochastic_residual,
        }


@dataclass(frozen=True)
class SpectralClass:
    p_fixed_dim: int
    q_has_fixed: bool
    ergodic: bool
    normal_rep: bool
    # None when the mixing criterion does not apply
    mixing: bool = None
    p_spectrum: list = field(default_factory=list)
    q_spectrum: list = field(default_factory=list)

    def as_dict(self):
        return {
            'p_fixed_dim': self.p_fixed_dim,
            'q_has_fixed': self.q_has_fixed,
            'ergodic': self.ergodic,
            'normal_rep': self.normal_rep,
            'mixing': 'undetermined' if self.mixing is None else self.mixing,
            'p_spectrum': [[z.real, z.imag] for z in self.p_spectrum],
            'q_spectrum': [[z.real, z.imag] for z in self.q_spectrum],
        }


@dataclass(frozen=True)
class CandidateReport:
    valid: bool
    non_pq: list
    rep_residual: float
    tp_residual: float

    def as_dict(self):
        return {
            'valid': self.valid,
            'non_pq': self.non_pq,
            'rep_residual': self.rep_residual,
            'tp_residual': self.tp_residual,
        }
