"""
Reproduction suites. Each suite recomputes a group of published numbers
and returns one ReproCheck per number.
"""

import logging

import numpy as np

from qchannels.utils import matrix_rep
from core.exceptions import ParameterError
from core.utils import max_abs, random_density
from oqrw.combinatorics import alpha, first_return_exact
from oqrw.gallery import case1, case2, case3, walk_gallery
from oqrw.recurrence import (
    case_formula, case_return_series, classical_return_limit, classical_return_series, theorem51_verdict,
)
from oqrw.utils import monitored_run
from pq.gallery import (
    amplitude_damping, bit_flip, bit_phase_flip, cnot2, depolarizing, landau_streater, landau_streater_kraus,
    landau_streater_pq_candidate,
)
from pq.utils import verify_pq_kraus_candidate
from stationary.classical import expected_visits, reflecting_chain
from stationary.utils import (
    barrier_walk, class_property_check, is_stationary, normalize, positive_recurrence_check, rho_st,
)

from .models import ReproCheck

logger = logging.getLogger('cli')

GRID = (0.3, 0.5, 0.7)


def bit_flip_golden(p):
    q = 1 - p
    return np.array([[p, 0, 0, q], [0, p, q, 0], [0, q, p, 0], [q, 0, 0, p]])


def bit_phase_flip_golden(p):
    q = 1 - p
    return np.array([[p, 0, 0, q], [0, p, -q, 0], [0, -q, p, 0], [q, 0, 0, p]])


def amplitude_damping_golden(p):
    s = np.sqrt(1 - p)
    return np.array([[1, 0, 0, p], [0, s, 0, 0], [0, 0, s, 0], [0, 0, 0, 1 - p]])


def depolarizing_golden(p):
    return np.array([[1 - p / 2, 0, 0, p / 2], [0, 1 - p, 0, 0], [0, 0, 1 - p, 0], [p / 2, 0, 0, 1 - p / 2]])


def cnot_golden(p):
    r = 1 - p
    M = np.zeros((16, 16))
    M[0, 0] = 1
    for (i, j), value in {
        (1, 1): p, (1, 3): r, (2, 2): r, (2, 3): p, (3, 1): r, (3, 2): p,
        (4, 4): p, (4, 12): r, (5, 5): p, (5, 15): r, (6, 7): p, (6, 14): r,
        (7, 6): p, (7, 13): r, (8, 8): r, (8, 12): p, (9, 11): r, (9, 13): p,
        (10, 10): r, (10, 15): p, (11, 9): r, (11, 14): p, (12, 4): r, (12, 8): p,
        (13, 7): r, (13, 9): p, (14, 6): r, (14, 11): p, (15, 5): r, (15, 10): p,
    }.items():
        M[i, j] = value
    return M


def landau_streater_golden():
    M = np.zeros((9, 9))
    for i, j in [(0, 4), (0, 8), (4, 0), (4, 8), (8, 0), (8, 4)]:
        M[i, j] = 0.5
    for i, j in [(1, 3), (2, 6), (3, 1), (5, 7), (6, 2), (7, 5)]:
        M[i, j] = -0.5
    return M


def _close(suite, check, value, expected, threshold):
    value, expected = float(value), float(expected)
    return ReproCheck(suite, check, value, expected, abs(value - expected), threshold)


def _flag(suite, check, holds):
    return ReproCheck(suite, check, float(holds), 1.0, 0.0 if holds else 1.0, 0.0)


def _matrix(suite, check, M, golden, threshold=1e-12):
    residual = max_abs(np.asarray(M) - golden)
    return ReproCheck(suite, check, residual, 0.0, residual, threshold)


def appendix_suite(seed=0):
    checks = []
    for name, channel, golden in (
        ('bit_flip', bit_flip, bit_flip_golden),
        ('bit_phase_flip', bit_phase_flip, bit_phase_flip_golden),
        ('amplitude_damping', amplitude_damping, amplitude_damping_golden),
        ('depolarizing', depolarizing, depolarizing_golden),
    ):
        for p in (0.2, 0.4, 0.7):
            checks.append(_matrix('appendix', f'{name}(p={p})', matrix_rep(channel(p)), golden(p)))
    checks.append(_matrix('appendix', 'cnot2(p=0.7)', matrix_rep(cnot2(0.7)), cnot_golden(0.7)))
    return checks


def landau_streater_suite(seed=0):
    suite = 'landau_streater'
    ch = landau_streater()
    candidate = verify_pq_kraus_candidate(ch, landau_streater_pq_candidate())
    original = verify_pq_kraus_candidate(ch, landau_streater_kraus())
    return [
        _matrix(suite, 'representation', matrix_rep(ch), landau_streater_golden()),
        ReproCheck(suite, 'pq candidate reproduces the channel', candidate.rep_residual, 0.0,
                   candidate.rep_residual, 1e-12),
        _flag(suite, 'pq candidate is valid', candidate.valid),
        _flag(suite, 'original Kraus matrices 2 and 3 are not PQ', original.non_pq == [1, 2]),
    ]


def classical_suite(seed=0):
    suite = 'classical'
    walk = walk_gallery('classical', {'p': 0.5}, window=(-13, 13))
    series = monitored_run(walk, np.eye(2) / 2, 0, 12)
    checks = []
    partial = 0.0
    for K in range(1, 7):
        partial += alpha(K) * 4.0 ** -K
        checks.append(_close(suite, f'sum alpha_k 4^-k, K={K}', series.cumulative_return[2 * K - 1], partial, 1e-9))
    symmetric = classical_return_series(0.5, 200)
    checks.append(ReproCheck(suite, 'symmetric series at K=200 reaches 0.95', float(symmetric[-1]), 1.0,
                             1.0 - float(symmetric[-1]), 0.05))
    checks.append(_flag(suite, 'symmetric series is nondecreasing', bool(np.all(np.diff(symmetric) >= 0))))
    for p, K in ((0.2, 200), (0.3, 200), (0.45, 2000)):
        checks.append(_close(suite, f'1 - |1 - 2p| at p={p}, K={K}', classical_return_series(p, K)[-1],
                             classical_return_limit(p), 1e-6))
    return checks


def _grid_pairs():
    for x in GRID:
        yield 1, {'l11sq': x, 'l22sq': x}, case1(x, x), x
        yield 2, {'x': x, 'y': 1 - x}, case2(x, 1 - x), x
        yield 3, {'x': x}, case3(x), x


def theorem51_suite(seed=0):
    suite = 'theorem51'
    rho = np.diag([0.3, 0.7])
    checks = []
    for case, params, (L, R), x in _grid_pairs():
        label = f"case {case} {', '.join(f'{k}={v:g}' for k, v in params.items())}"
        verdict = theorem51_verdict(L, R)
        checks.append(_flag(suite, f'{label}: verdict', verdict['recurrent'] == (x == 0.5)))
        if x != 0.5:
            limit = 1 - np.sqrt(1 - 4 * x * (1 - x))
            checks.append(_close(suite, f'{label}: series at K=200', case_return_series(case, params, rho, 200)[-1],
                                 limit, 1e-4))
        exact = first_return_exact(L, R, rho, 6)
        residual = max(abs(exact[k] - case_formula(case, params, rho, k)) for k in exact)
        checks.append(ReproCheck(suite, f'{label}: enumeration matches formula, k<=6', residual, 0.0, residual, 1e-12))
    return checks


def amplitude_damping_suite(seed=0):
    suite = 'amplitude_damping'
    p = 0.5
    walk = walk_gallery('amplitude_damping', {'p': p}, window=(-101, 101))
    rho = np.diag([0.3, 0.7])
    series = monitored_run(walk, rho, 0, 100)
    report = positive_recurrence_check(walk, 0, rho, 100)
    return [
        _close(suite, 'S_100', series.per_step_mass[-1], 0.3 + 0.7 * (1 - p) ** 2, 1e-6),
        _flag(suite, 'positive recurrence check fails', report.verdict == 'fails'),
    ]


def barrier_suite(seed=0):
    suite = 'barrier'
    walk = barrier_walk(0.3, 0.3, 401)
    rho = random_density(2, np.random.default_rng(seed))
    op = rho_st(walk, 0, rho, 400)
    stationarity = is_stationary(walk, normalize(op))
    report = positive_recurrence_check(walk, 0, rho, 400)
    checks = [
        _close(suite, 'tr rho_st(0)', np.trace(op.block(0)).real, 1.0, 1e-6),
        ReproCheck(suite, 'normalized rho_st is stationary', stationarity['max_residual'], 0.0,
                   stationarity['max_residual'], 1e-8),
        _flag(suite, 'positive recurrent evidence', report.verdict == 'positive_recurrent_evidence'),
    ]

    p11, p22 = 0.3, 0.2
    skewed = rho_st(barrier_walk(p11, p22, 401), 0, np.diag([0.4, 0.6]), 400)
    n = 40
    expected = np.concatenate([
        0.4 * expected_visits(reflecting_chain(p11, n + 1), 0)[:n],
        0.6 * expected_visits(reflecting_chain(p22, n + 1), 0)[:n],
    ])
    diagonal = np.concatenate([skewed.blocks[:n, 0, 0].real, skewed.blocks[:n, 1, 1].real])
    checks.append(ReproCheck(suite, 'diagonal traces match the reflecting chains', max_abs(diagonal - expected), 0.0,
                             max_abs(diagonal - expected), 1e-8))

    masses = class_property_check(barrier_walk(0.3, 0.3, 610), 1, [0, 2], 600)
    for source, mass in masses.items():
        checks.append(_close(suite, f'first-passage mass to 1 from {source}', mass, 1.0, 1e-6))
    return checks


SUITES = {
    'appendix': appendix_suite,
    'landau_streater': landau_streater_suite,
    'classical': classical_suite,
    'theorem51': theorem51_suite,
    'amplitude_damping': amplitude_damping_suite,
    'barrier': barrier_suite,
}


def run_suite(name, seed=0):
    """
    Checks of one suite, or of every suite for ``all``.

    Raises:
        ParameterError: unknown suite
    """
    if name == 'all':
        return [check for suite in SUITES for check in run_suite(suite, seed)]
    if name not in SUITES:
        raise ParameterError(f"Unknown suite '{name}'", suite=name, choices=sorted(SUITES) + ['all'])
    checks = SUITES[name](seed=seed)
    failed = [check.check for check in checks if not check.passed]
    if failed:
        logger.warning(f"Suite {name}: {len(failed)} of {len(checks)} checks failed: {failed}")
    else:
        logger.info(f"Suite {name}: {len(checks)} checks passed")
    return checks
