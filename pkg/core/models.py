"""
Value types shared across the project.

Nothing here is persisted; these are frozen dataclasses around read-only
numpy arrays so they can be passed between threads and cached freely.
"""

from dataclasses import dataclass, field

import numpy as np


def frozen(A, dtype=complex):
    """Return a read-only copy of ``A``."""
    out = np.array(A, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class PSDReport:
    hermitian: bool
    min_eig: float
    psd: bool

    def as_dict(self):
        return {'hermitian': self.hermitian, 'min_eig': self.min_eig, 'psd': self.psd}


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A d x d matrix that is Hermitian, PSD and of unit trace within ``tol``."""
    mat: np.ndarray
    tol: float = 1e-10

    def __post_init__(self):
        object.__setattr__(self, 'mat', frozen(self.mat))

    @property
    def dim(self):
        return self.mat.shape[0]


@dataclass(frozen=True, eq=False)
class PositiveOperator:
    """
    A Hermitian PSD block, possibly sub-normalized.

    Walk states and first-return operators are built from these; ``mass`` is
    the trace.
    """
    mat: np.ndarray
    mass: float = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, 'mat', frozen(self.mat))
        if self.mass is None:
            object.__setattr__(self, 'mass', float(np.trace(self.mat).real))

    @property
    def dim(self):
        return self.mat.shape[0]
