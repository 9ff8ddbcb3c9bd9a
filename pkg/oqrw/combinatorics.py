"""
First-return paths of the nearest-neighbour walk.

A word w in {L, R}^{2k} is read in time order: w[0] is the first move. It is
a first-return word when its lattice path from 0 is back at 0 at time 2k and
nowhere before. There are alpha(k) = C(2k, k) / (2k - 1) of them.
"""

import logging
from collections import Counter
from functools import lru_cache
from math import comb

import numpy as np
from django.conf import settings

from core.exceptions import CapExceededError, ParameterError
from core.utils import DEFAULT_TOL, density_matrix

from .utils import nn_pair

logger = logging.getLogger('oqrw')


def max_kmax():
    return getattr(settings, 'OQRW_MAX_KMAX', 12)


def positive_int(k, name='k'):
    if int(k) != k or k < 1:
        raise ParameterError(f"{name} must be a positive integer", **{name: k})
    return int(k)


def check_cap(k_max, cap):
    cap = max_kmax() if cap is None else cap
    if k_max > cap:
        raise CapExceededError(f"k_max={k_max} exceeds the enumeration cap {cap}", k_max=k_max, cap=cap)


def alpha(k):
    """Number of first-return words of length 2k (exact integer)."""
    k = positive_int(k)
    return comb(2 * k, k) // (2 * k - 1)


def first_return_words(k):
    """
    Yield the first-return words of length 2k in lexicographic order ('L' < 'R').

    Only prefixes that can still come back at time 2k are extended.
    """
    k = positive_int(k)
    n = 2 * k
    word = []

    def extend(height, t):
        if t == n:
            yield ''.join(word)
            return
        for move, delta in (('L', -1), ('R', 1)):
            h = height + delta
            if abs(h) > n - t - 1 or (h == 0 and t + 1 < n):
                continue
            word.append(move)
            yield from extend(h, t + 1)
            word.pop()

    yield from extend(0, 0)


@lru_cache(maxsize=None)
def _case2_counts(k):
    counts = Counter(sum(1 for t in range(0, 2 * k, 2) if w[t] == 'R') for w in first_return_words(k))
    return tuple(counts.get(b, 0) for b in range(k + 1))


def case2_counts(k):
    """
    #P_{b,2k}: first-return words with exactly b right moves at odd times
    (times are counted from 1).

    Returns:
        dict b -> count for b = 0..k
    """
    return dict(enumerate(_case2_counts(positive_int(k))))


@lru_cache(maxsize=None)
def _case3_counts(k):
    counts = Counter()
    for w in first_return_words(k):
        rights = 0
        c = 0
        for move in w:
            if move == 'R':
                rights += 1
            elif rights % 2 == 0:
                c += 1
        counts[c] += 1
    return tuple(counts.get(c, 0) for c in range(k + 1))


def case3_counts(k):
    """
    #Q_{c,2k}: first-return words in which exactly c left moves happen after
    an even number of right moves.
    """
    return dict(enumerate(_case3_counts(positive_int(k))))


def _excursions(away, toward, rho, k_max, out):
    """
    Add tr(w rho w*) over one-sided first-return words to ``out[k]``.

    ``away`` is the first move; the path then stays on its side of 0 until
    a ``toward`` move brings it back.
    """
    n = 2 * k_max
    away_h = away.conj().T
    toward_h = toward.conj().T

    def visit(X, height, t):
        if height == 1:
            Y = toward @ X @ toward_h
            out[(t + 1) // 2] += float(np.trace(Y).real)
        else:
            visit(toward @ X @ toward_h, height - 1, t + 1)
        if height + 1 <= n - t - 1:
            visit(away @ X @ away_h, height + 1, t + 1)

    visit(away @ rho @ away_h, 1, 1)


def first_return_exact(L, R, rho0, k_max, cap=None, tol=DEFAULT_TOL):
    """
    Probability of a first return to the origin at time 2k, k = 1..k_max,
    by direct enumeration of first-return words.

    Valid for any pair with L*L + R*R = I, PQ or not. Right excursions are
    summed before left ones and each side in depth-first order, so results
    are bit-reproducible.

    Args:
        L, R: left and right transition matrices
        rho0: initial density at the origin
        k_max: largest half-time
        cap: enumeration cap, settings.OQRW_MAX_KMAX when None

    Returns:
        dict k -> probability

    Raises:
        CapExceededError: k_max above the cap
        CompletenessError: L*L + R*R is not the identity
    """
    k_max = positive_int(k_max, 'k_max')
    check_cap(k_max, cap)
    L, R = nn_pair(L, R, tol)
    rho = density_matrix(rho0, tol, name='rho0').mat
    out = {k: 0.0 for k in range(1, k_max + 1)}
    _excursions(R, L, rho, k_max, out)
    _excursions(L, R, rho, k_max, out)
    logger.debug(f"Enumerated first returns up to k={k_max}: total {sum(out.values()):.12f}")
    return out


def case2_return_terms(x, y, K):
    """
    Case 2 first-return probabilities f_1..f_K for every K, by dynamic
    programming over the signed height.

    From the first basis state the walk alternates: at odd times it moves
    right with probability 1 - x, at even times with probability y. The
    result does not depend on the initial density.
    """
    K = positive_int(K, 'K')
    width = 2 * K + 1
    current = np.zeros(width)
    current[K] = 1.0
    terms = np.zeros(K)
    for t in range(1, 2 * K + 1):
        right = 1.0 - x if t % 2 else y
        moved = np.zeros(width)
        moved[1:] += right * current[:-1]
        moved[:-1] += (1.0 - right) * current[1:]
        if t % 2 == 0:
            terms[t // 2 - 1] = moved[K]
            moved[K] = 0.0
        current = moved
    return terms
