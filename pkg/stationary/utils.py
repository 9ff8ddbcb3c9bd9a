"""
Stationary operators, first-return operators and positive recurrence.

The first-return operators of a seed rho_x placed at x are

    S^T_{rho_x, j} = sum over paths x -> i_1 -> ... -> i_{T-1} -> j with every i_t != x

and rho_st(j) = sum_T S^T_{rho_x, j}. Both come from one x-avoiding forward
recursion: apply the walk, record what arrives, then drop the x block before
the next step. Infinite sums are truncated at a horizon and reported with
tail diagnostics; nothing here claims a limit.
"""

import logging

import numpy as np
from scipy import linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from core.exceptions import DimensionError, ParameterError, StationarityError, WindowError
from core.models import PositiveOperator
from core.utils import DEFAULT_TOL, hermitian_part, max_abs, positive_operator, state_family
from oqrw.utils import check_margin, from_transitions, initial_state, propagate

from .models import CommunicationStructure, FirstReturnOperators, PositiveRecurrenceReport, StationaryOperator

logger = logging.getLogger('stationary')

STATIONARY_TOL = 1e-8
# Share of the horizon inspected by the convergence diagnostics
TAIL_FRACTION = 0.1


def _horizon(T_max, name='T_max'):
    if int(T_max) != T_max or T_max < 1:
        raise ParameterError(f"{name} must be a positive integer", **{name: T_max})
    return int(T_max)


def embed(walk, op, tol=DEFAULT_TOL):
    """
    Blocks of ``op`` laid out on the walk's window.

    Raises:
        DimensionError: block size differs from the walk's d
        WindowError: a nonzero block outside the window or on an open site
    """
    blocks = np.asarray(op.blocks)
    if blocks.shape[1] != walk.dim:
        raise DimensionError(f"Blocks are {blocks.shape[1]}x{blocks.shape[1]}, walk has d={walk.dim}",
                             block_dim=blocks.shape[1], walk_dim=walk.dim)
    out = np.zeros((walk.n_sites, walk.dim, walk.dim), dtype=complex)
    open_sites = set(walk.open_sites)
    for s, block in enumerate(blocks):
        site = op.lo + s
        if not np.any(block):
            continue
        if not walk.contains(site):
            raise WindowError(f"Operator has a block at site {site}, outside the window [{walk.lo}, {walk.hi}]",
                              site=site)
        if site in open_sites and abs(np.trace(block)) > tol:
            raise WindowError(f"Operator has mass on the open site {site}", site=site,
                              mass=float(np.trace(block).real))
        out[walk.index(site)] = block
    return out


def operator_from_blocks(walk, blocks, normalized=False):
    """StationaryOperator from {site: block} on the walk's window."""
    out = np.zeros((walk.n_sites, walk.dim, walk.dim), dtype=complex)
    for site, block in blocks.items():
        if not walk.contains(int(site)):
            raise WindowError(f"Site {site} lies outside the window [{walk.lo}, {walk.hi}]", site=int(site))
        out[walk.index(int(site))] = positive_operator(block, name=f'block at {site}').mat
    return StationaryOperator(lo=walk.lo, blocks=out, normalized=normalized)


def is_stationary(walk, op, tol=STATIONARY_TOL):
    """
    max_i ||sum_j B_j^i rho_j B_j^i* - rho_i||_max.

    Returns:
        dict with 'stationary' and 'max_residual'
    """
    blocks = embed(walk, op)
    moved, _ = propagate(walk, blocks)
    residual = max_abs(moved - blocks)
    logger.debug(f"Stationarity residual {residual:.3e} on [{walk.lo}, {walk.hi}]")
    return {'stationary': residual <= tol, 'max_residual': residual}


def stationarity_propagation(walk, op, n=5):
    """
    Residuals of Omega^m(rho) - rho for m = 1..n.
    """
    blocks = embed(walk, op)
    current = blocks
    residuals = []
    for _ in range(_horizon(n, 'n')):
        current, _ = propagate(walk, current)
        residuals.append(max_abs(current - blocks))
    return residuals


def first_return_operators(walk, x, rho_x, T_max, keep=False, tol=DEFAULT_TOL):
    """
    Run the x-avoiding recursion for T = 1..T_max.

    Args:
        walk: WalkSpec
        x: site of the seed
        rho_x: PSD seed, any trace
        T_max: horizon
        keep: also return every nonzero S^T_{rho_x, j}

    Returns:
        FirstReturnOperators

    Raises:
        WindowError: T_max steps from x could reach an open site
    """
    T_max = _horizon(T_max)
    check_margin(walk, x, T_max)
    state = initial_state(walk, rho_x, x, tol)
    seed = state.block(x).copy()
    blocks = state.blocks.copy()
    o = walk.index(x)
    d = walk.dim

    returns = np.zeros((T_max, d, d), dtype=complex)
    occupation = np.zeros_like(blocks)
    step_traces = np.zeros(T_max)
    kept = {} if keep else None
    for T in range(1, T_max + 1):
        blocks, _ = propagate(walk, blocks)
        occupation += blocks
        traces = np.einsum('sii->s', blocks).real
        step_traces[T - 1] = traces.sum()
        returns[T - 1] = blocks[o]
        if keep:
            for s in np.flatnonzero(np.abs(blocks).max(axis=(1, 2)) > 0):
                kept[(T, walk.lo + int(s))] = PositiveOperator(mat=blocks[s])
        blocks[o] = 0

    ops = FirstReturnOperators(
        origin=x,
        seed=seed,
        horizon=T_max,
        lo=walk.lo,
        returns=returns,
        occupation=occupation,
        step_traces=step_traces,
        tail_mass=float(np.einsum('sii->', blocks).real),
        S=kept,
    )
    logger.debug(f"First-return operators from {x}: horizon {T_max}, returned {ops.returned_mass:.12f}, "
                 f"tail {ops.tail_mass:.3e}")
    return ops


def _reuse(walk, x, rho_x, T_max, ops):
    if ops is None:
        return first_return_operators(walk, x, rho_x, T_max)
    if (ops.origin, ops.horizon, ops.lo) != (x, T_max, walk.lo):
        raise ParameterError("First-return operators were computed for another origin, horizon or window",
                             origin=ops.origin, horizon=ops.horizon, lo=ops.lo)
    return ops


def rho_st(walk, x, rho_x, T_max, ops=None):
    """
    Truncated rho_st(j) = sum_{T <= T_max} S^T_{rho_x, j}, unnormalized.

    ``tail_mass`` on the result is the x-avoiding mass still in flight at T_max.
    ``ops`` from an earlier first_return_operators run on the same origin and
    horizon is reused instead of running the recursion again.
    """
    ops = _reuse(walk, x, rho_x, T_max, ops)
    return StationaryOperator(lo=walk.lo, blocks=ops.occupation, tail_mass=ops.tail_mass, horizon=T_max)


def normalize(op):
    """Scale an operator to unit total trace."""
    total = op.trace_sum
    if total <= 0:
        raise ParameterError("Operator has no mass to normalize", trace_sum=total)
    return StationaryOperator(
        lo=op.lo,
        blocks=np.asarray(op.blocks) / total,
        normalized=True,
        tail_mass=op.tail_mass / total,
        horizon=op.horizon,
    )


def _tail(values, fraction=TAIL_FRACTION):
    count = max(1, int(round(len(values) * fraction)))
    return float(np.sum(values[-count:]))


def positive_recurrence_check(walk, x, rho_x, T_max, tol=STATIONARY_TOL, ops=None):
    """
    Truncated evidence for positive recurrence of x.

    The trace sum is called converged when the increments over the last
    tenth of the horizon add up to at most tol * T_max. The verdict is
    ``positive_recurrent_evidence`` when it converged and sum_T S^T_{rho_x, x}
    equals rho_x within tol, ``fails`` when returns to x have stopped short
    of rho_x, and ``inconclusive`` otherwise.

    ``ops`` is reused the way rho_st reuses it.

    Returns:
        PositiveRecurrenceReport
    """
    ops = _reuse(walk, x, rho_x, T_max, ops)
    last_decade = _tail(ops.step_traces)
    converged = last_decade <= tol * ops.horizon
    residual = max_abs(ops.return_sum - ops.seed)
    returns_settled = _tail(ops.return_traces) <= tol

    if converged and residual <= tol:
        verdict = 'positive_recurrent_evidence'
    elif returns_settled and residual > tol:
        verdict = 'fails'
    else:
        verdict = 'inconclusive'

    report = PositiveRecurrenceReport(
        origin=x,
        horizon=ops.horizon,
        trace_sum=float(ops.step_traces.sum()),
        trace_sum_converged=converged,
        last_decade_increment=last_decade,
        returned_mass=ops.returned_mass,
        fixed_point_residual=residual,
        tail_mass=ops.tail_mass,
        verdict=verdict,
    )
    logger.info(f"Positive recurrence check at {x} on {walk.name or '<walk>'}: {verdict} "
                f"(trace sum {report.trace_sum:.6f}, residual {residual:.3e})")
    return report


def dominance_margins(walk, lam, k, T_max, tol=STATIONARY_TOL):
    """
    Smallest eigenvalue of lambda_j - sum_{T <= T_max} S^T_{lambda_k, j} per window site.

    Raises:
        StationarityError: ``lam`` is not stationary within tol
    """
    check = is_stationary(walk, lam, tol)
    if not check['stationary']:
        raise StationarityError("Operator is not stationary for the walk", residual=check['max_residual'])
    blocks = embed(walk, lam)
    ops = first_return_operators(walk, k, blocks[walk.index(k)], T_max)
    gaps = blocks - ops.occupation
    return np.array([linalg.eigvalsh(hermitian_part(gap))[0] for gap in gaps])


def dominance_check(walk, lam, k, T_max, tol=STATIONARY_TOL):
    """rho_{st, lambda_k}(j) <= lambda_j for every window site j."""
    return bool(np.all(dominance_margins(walk, lam, k, T_max, tol) >= -tol))


def hitting_mass(walk, target, source, rho, T_max):
    """
    Probability that the walk started at rho kron |source><source| visits
    ``target`` at some time 1..T_max.
    """
    T_max = _horizon(T_max)
    check_margin(walk, source, T_max)
    if not walk.contains(target):
        raise WindowError(f"Site {target} lies outside the window [{walk.lo}, {walk.hi}]", site=target)
    blocks = initial_state(walk, rho, source).blocks.copy()
    t = walk.index(target)
    total = 0.0
    for _ in range(T_max):
        blocks, _ = propagate(walk, blocks)
        total += float(np.trace(blocks[t]).real)
        blocks[t] = 0
    return total


def class_property_check(walk, x, sources, T_max, rho=None):
    """
    Hitting mass of x from each source site (x itself gives the return mass).

    Returns:
        dict source -> mass
    """
    rho = np.eye(walk.dim) / walk.dim if rho is None else rho
    return {y: hitting_mass(walk, x, y, rho, T_max) for y in sources}


def _reach_from(walk, operators, horizon, tol):
    """
    seen[a, b]: operator a placed at site index a has put more than tol of
    trace on site index b at some time 0..horizon.
    """
    n = walk.n_sites
    batch = np.zeros((n, n, walk.dim, walk.dim), dtype=complex)
    for a, rho in operators.items():
        batch[a, a] = rho
    seen = np.einsum('abii->ab', batch).real > tol
    for _ in range(horizon):
        batch, _ = propagate(walk, batch)
        seen |= np.einsum('abii->ab', batch).real > tol
    return seen


def communication_structure(walk, states=None, horizon=None, mode='all', origin=0, seed_state=None,
                            tol=DEFAULT_TOL, seed=0, n_random=20):
    """
    Accessibility i -> j between window sites and its communication classes.

    Modes:
        all: i -> j when every test state placed at i reaches j within the
            horizon. The family defaults to basis states, the maximally mixed
            state and ``n_random`` seeded random densities.
        reached: start from ``seed_state`` at ``origin`` and use, at every
            site, the operator the walk actually delivers there; sites that
            are never reached have no outgoing arrows.

    Mass leaving the window is dropped.

    Returns:
        CommunicationStructure
    """
    horizon = walk.n_sites if horizon is None else _horizon(horizon, 'horizon')
    n = walk.n_sites
    if mode == 'all':
        family = states if states is not None else state_family(walk.dim, seed=seed, n_random=n_random)
        family = [item if isinstance(item, tuple) else (f'state_{index}', item) for index, item in enumerate(family)]
        reach = np.ones((n, n), dtype=bool)
        for label, rho in family:
            rho = positive_operator(rho, tol).mat
            reach &= _reach_from(walk, {a: rho for a in range(n)}, horizon, tol)
        labels = [label for label, _ in family]
    elif mode == 'reached':
        seed_state = np.eye(walk.dim) / walk.dim if seed_state is None else seed_state
        blocks = initial_state(walk, seed_state, origin, tol).blocks.copy()
        occupation = blocks.copy()
        for _ in range(horizon):
            blocks, _ = propagate(walk, blocks)
            occupation += blocks
        masses = np.einsum('sii->s', occupation).real
        delivered = {a: occupation[a] / masses[a] for a in range(n) if masses[a] > tol}
        reach = _reach_from(walk, delivered, horizon, tol)
        reach |= np.eye(n, dtype=bool)
        labels = [f'reached_from_{origin}']
    else:
        raise ParameterError(f"Unknown accessibility mode '{mode}'", mode=mode, choices=['all', 'reached'])

    n_classes, assignment = connected_components(csr_matrix(reach.astype(int)), directed=True, connection='strong')
    classes = {}
    for a, label in enumerate(assignment):
        classes.setdefault(int(label), []).append(walk.lo + a)
    classes = sorted(classes.values(), key=lambda sites: sites[0])
    structure = CommunicationStructure(
        lo=walk.lo,
        reach=reach,
        classes=classes,
        irreducible=n_classes == 1,
        mode=mode,
        family=labels,
    )
    logger.info(f"Communication structure of {walk.name or '<walk>'} ({mode}): {n_classes} classes")
    return structure


def _barrier_probability(value, name):
    value = float(value)
    if not 0 < value < 0.5:
        raise ParameterError(f"{name} must lie in (0, 1/2) so that it stays below q = 1 - {name}", **{name: value})
    return value


def barrier_walk(p11, p22, window_hi, tol=DEFAULT_TOL):
    """
    Two classical walks with a retaining barrier at 0 carried by the diagonal:
    B_0^1 = I, and for i >= 1 B_i^{i-1} = diag(sqrt(q11), sqrt(q22)),
    B_i^{i+1} = diag(sqrt(p11), sqrt(p22)) with q_jj = 1 - p_jj.

    Raises:
        ParameterError: p_jj outside (0, 1/2) or window_hi < 1
    """
    p11 = _barrier_probability(p11, 'p11')
    p22 = _barrier_probability(p22, 'p22')
    if int(window_hi) < 1:
        raise ParameterError("window_hi must be at least 1", window_hi=window_hi)
    window_hi = int(window_hi)
    P = np.diag([np.sqrt(p11), np.sqrt(p22)])
    Q = np.diag([np.sqrt(1 - p11), np.sqrt(1 - p22)])
    transitions = {(0, 1): np.eye(2)}
    for i in range(1, window_hi + 1):
        transitions[(i, i - 1)] = Q
        transitions[(i, i + 1)] = P
    return from_transitions(2, (0, window_hi), transitions, tol, name=f'barrier(p11={p11}, p22={p22})')


def barrier_path_block(p11, p22, rho0, n, k):
    """
    Block carried by one n-step barrier path from 0 with k right moves, the
    forced first move included:

        [[p11^(k-1) q11^(n-k) rho11,               (p11 p22)^((k-1)/2) (q11 q22)^((n-k)/2) rho12],
         [(p11 p22)^((k-1)/2) (q11 q22)^((n-k)/2) rho21,  p22^(k-1) q22^(n-k) rho22]]
    """
    rho0 = np.asarray(rho0, dtype=complex)
    q11, q22 = 1 - p11, 1 - p22
    scale = np.array([
        [p11 ** (k - 1) * q11 ** (n - k), np.sqrt(p11 * p22) ** (k - 1) * np.sqrt(q11 * q22) ** (n - k)],
        [np.sqrt(p11 * p22) ** (k - 1) * np.sqrt(q11 * q22) ** (n - k), p22 ** (k - 1) * q22 ** (n - k)],
    ])
    return scale * rho0
