"""
Classical Markov-chain oracle for walks whose transitions are multiples of
the identity. Matrices here are row-stochastic: P[i, j] is the probability
of moving from site index i to site index j.
"""

import logging

import numpy as np
from scipy import linalg

from core.exceptions import ParameterError, UnsupportedError

logger = logging.getLogger('stationary')


def induced_stochastic_matrix(walk, close=True):
    """
    P[i, j] = |c|^2 where B_i^j = c I.

    With ``close`` the probability of leaving the window is put back on the
    diagonal (a lazy reflection at the open sites), so P is stochastic.

    Raises:
        UnsupportedError: some transition is not a multiple of the identity
    """
    if not walk.scalar():
        raise UnsupportedError("Walk transitions are not multiples of the identity", walk=walk.name)
    n = walk.n_sites
    P = np.zeros((n, n))
    weights = np.abs(walk.kernels[:, :, 0, 0]) ** 2
    for offset, row in zip(walk.offsets, weights):
        for s in range(n):
            if row[s] == 0:
                continue
            t = s + offset
            if 0 <= t < n:
                P[s, t] += row[s]
            elif close:
                P[s, s] += row[s]
    return P


def stationary_distribution(P):
    """
    Stationary distribution of an irreducible row-stochastic matrix by
    Grassmann-Taksar-Heyman elimination (subtraction free).
    """
    A = np.array(P, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ParameterError("Stochastic matrix must be square", shape=list(A.shape))
    for k in range(n - 1, 0, -1):
        s = A[k, :k].sum()
        if s <= 0:
            raise ParameterError("Chain is reducible", state=k)
        A[:k, k] /= s
        A[:k, :k] += np.outer(A[:k, k], A[k, :k])
    pi = np.zeros(n)
    pi[0] = 1.0
    for k in range(1, n):
        pi[k] = pi[:k] @ A[:k, k]
    return pi / pi.sum()


def expected_visits(P, i):
    """
    gamma^i_j: expected number of times 0 <= n < T_i the chain started at i
    spends in j, so gamma^i_i = 1.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    others = [j for j in range(n) if j != i]
    gamma = np.zeros(n)
    gamma[i] = 1.0
    if others:
        A = np.eye(n - 1) - P[np.ix_(others, others)]
        gamma[others] = linalg.solve(A.T, P[i, others])
    return gamma


def expected_return_time(P, i):
    """E_i T_i = sum_j gamma^i_j."""
    return float(expected_visits(P, i).sum())


def reflecting_chain(p, n):
    """
    Row-stochastic birth-death chain on 0..n-1 that always leaves 0 to the
    right, moves right with probability p elsewhere and holds at n-1
    instead of leaving.
    """
    p = float(p)
    if not 0 < p < 1:
        raise ParameterError("p must lie in (0, 1)", p=p)
    if n < 2:
        raise ParameterError("The chain needs at least two states", n=n)
    P = np.zeros((n, n))
    P[0, 1] = 1.0
    for i in range(1, n):
        P[i, i - 1] = 1 - p
        P[i, min(i + 1, n - 1)] += p
    return P
