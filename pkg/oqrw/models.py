"""
Walk value types.

A walk on the window [lo, hi] of the integer lattice is stored as a list of
jump offsets and, per offset, one transition matrix per source site:
kernels[o, s] = B_j^{j + offsets[o]} with j = lo + s. Transitions whose
target lies outside the window are kept; the sites carrying them are the
window's open sites.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import pandas as pd

from core.models import PositiveOperator, frozen


@dataclass(frozen=True, eq=False)
class WalkSpec:
    dim: int
    lo: int
    hi: int
    offsets: tuple
    kernels: np.ndarray
    tol: float = 1e-10
    name: str = ''
    # (L, R) for nearest-neighbour walks built from one pair
    pair: tuple = None

    def __post_init__(self):
        object.__setattr__(self, 'offsets', tuple(int(o) for o in self.offsets))
        object.__setattr__(self, 'kernels', frozen(self.kernels))
        if self.pair is not None:
            object.__setattr__(self, 'pair', tuple(frozen(M) for M in self.pair))

    @property
    def window(self):
        return (self.lo, self.hi)

    @property
    def n_sites(self):
        return self.hi - self.lo + 1

    @property
    def sites(self):
        return range(self.lo, self.hi + 1)

    def index(self, site):
        return site - self.lo

    def contains(self, site):
        return self.lo <= site <= self.hi

    @cached_property
    def active(self):
        """Boolean (n_offsets, n_sites) mask of nonzero transitions."""
        return np.abs(self.kernels).max(axis=(2, 3)) > 0

    @cached_property
    def reach(self):
        """Largest jump length carried by a nonzero transition."""
        used = [abs(o) for o, row in zip(self.offsets, self.active) if row.any()]
        return max(used, default=0)

    @cached_property
    def open_sites(self):
        """Window sites with a nonzero transition to a site outside the window."""
        sites = set()
        for o, row in zip(self.offsets, self.active):
            for s in np.flatnonzero(row):
                target = self.lo + int(s) + o
                if not self.contains(target):
                    sites.add(self.lo + int(s))
        return tuple(sorted(sites))

    def transition(self, source, target):
        """B_source^target, zero when no such jump exists."""
        offset = target - source
        if offset in self.offsets and self.contains(source):
            return self.kernels[self.offsets.index(offset), self.index(source)]
        return np.zeros((self.dim, self.dim), dtype=complex)

    def transitions(self):
        """Nonzero transitions as {(source, target): matrix}."""
        out = {}
        for o, K, row in zip(self.offsets, self.kernels, self.active):
            for s in np.flatnonzero(row):
                source = self.lo + int(s)
                out[(source, source + o)] = K[s]
        return out

    def scalar(self, tol=None):
        """True when every transition is a multiple of the identity."""
        tol = self.tol if tol is None else tol
        diagonal = np.einsum('osii->osi', self.kernels)
        off = self.kernels - np.einsum('osi,ij->osij', diagonal, np.eye(self.dim))
        spread = np.abs(diagonal - diagonal[..., :1])
        return bool(np.all(np.abs(off) <= tol) and np.all(spread <= tol))


@dataclass(frozen=True, eq=False)
class WalkState:
    """
    Block-diagonal state sum_i rho_i kron |i><i| on a window starting at ``lo``.
    """
    lo: int
    blocks: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'blocks', frozen(self.blocks))

    @property
    def traces(self):
        return np.einsum('sii->s', self.blocks).real

    @property
    def mass(self):
        return float(self.traces.sum())

    def block(self, site):
        s = site - self.lo
        if 0 <= s < len(self.blocks):
            return self.blocks[s]
        return np.zeros(self.blocks.shape[1:], dtype=complex)

    @property
    def support(self):
        """Sites holding a nonzero block."""
        nonzero = np.abs(self.blocks).max(axis=(1, 2)) > 0
        return [self.lo + int(s) for s in np.flatnonzero(nonzero)]

    def operators(self):
        return {site: PositiveOperator(mat=self.block(site)) for site in self.support}


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """
    Monitored run from a state placed at ``origin``.

    ``per_step_mass[n-1]`` is S_n, the mass that has not yet come back after
    n steps; ``removed[n-1]`` is the mass projected out at step n.
    """
    origin: int
    per_step_mass: tuple
    removed: tuple
    cumulative_return: tuple
    initial_mass: float = 1.0
    label: str = ''
    meta: dict = field(default_factory=dict)

    @property
    def n_max(self):
        return len(self.per_step_mass)

    @property
    def return_estimate(self):
        return self.cumulative_return[-1] if self.cumulative_return else 0.0

    @property
    def first_return(self):
        """{k: mass removed at step 2k}."""
        return {n // 2: self.removed[n - 1] for n in range(2, self.n_max + 1, 2)}

    @property
    def ledger_residual(self):
        S = np.asarray(self.per_step_mass)
        R = np.asarray(self.cumulative_return)
        return float(np.max(np.abs(S + R - self.initial_mass))) if S.size else 0.0

    def tail_increment(self, fraction=0.1):
        """Returned mass over the last ``fraction`` of the run."""
        tail = max(1, int(round(self.n_max * fraction)))
        return float(sum(self.removed[-tail:]))

    def to_frame(self):
        return pd.DataFrame({
            'n': np.arange(1, self.n_max + 1),
            'S_n': np.asarray(self.per_step_mass, dtype=float),
            'cumulative_return': np.asarray(self.cumulative_return, dtype=float),
        })
