"""
Building and running open quantum random walks.

One step maps the block state sum_j rho_j kron |j><j| to
sum_i (sum_j B_j^i rho_j B_j^i*) kron |i><i|. Monitoring zeroes the origin
block after every step, so the mass taken out at step n is the probability
of a first return at time n.
"""

import logging

import numpy as np

from core.exceptions import CompletenessError, DimensionError, ParameterError, WindowError
from core.utils import DEFAULT_TOL, as_matrix, density_matrix, max_abs, positive_operator, state_family

from .models import ReturnSeries, WalkSpec, WalkState

logger = logging.getLogger('oqrw')


def _window(window):
    try:
        lo, hi = (int(v) for v in window)
    except (TypeError, ValueError):
        raise WindowError("Window must be a pair [lo, hi] of integers", window=repr(window))
    if lo > hi:
        raise WindowError(f"Window [{lo}, {hi}] is empty", window=[lo, hi])
    return lo, hi


def completeness_residuals(walk):
    """Per-site max-norm residual of sum_i B_j^i* B_j^i - I."""
    effects = np.einsum('osji,osjk->sik', walk.kernels.conj(), walk.kernels)
    return np.abs(effects - np.eye(walk.dim)).max(axis=(1, 2))


def _check_complete(walk, tol):
    residuals = completeness_residuals(walk)
    worst = int(np.argmax(residuals))
    if residuals[worst] > tol:
        site = walk.lo + worst
        logger.warning(f"Rejected walk {walk.name or '<explicit>'}: completeness residual "
                       f"{residuals[worst]:.3e} at site {site}")
        raise CompletenessError(
            f"Effects leaving site {site} do not sum to the identity (residual {residuals[worst]:.3e})",
            residual=float(residuals[worst]),
            site=site,
        )
    return walk


def pair_residual(L, R):
    """Max-norm residual of L*L + R*R - I."""
    return max_abs(L.conj().T @ L + R.conj().T @ R - np.eye(L.shape[0]))


def nn_pair(L, R, tol=DEFAULT_TOL):
    """
    Validate a nearest-neighbour pair.

    Raises:
        DimensionError: non-square or mismatched matrices
        CompletenessError: L*L + R*R differs from I by more than tol
    """
    L = as_matrix(L, square=True, name='L')
    R = as_matrix(R, square=True, name='R')
    if L.shape != R.shape:
        raise DimensionError("L and R have different dimensions", L=list(L.shape), R=list(R.shape))
    residual = pair_residual(L, R)
    if residual > tol:
        raise CompletenessError(f"L*L + R*R is not the identity (residual {residual:.3e})", residual=residual)
    return L, R


def make_nn_walk(L, R, window, tol=DEFAULT_TOL, name=''):
    """
    Translation-invariant nearest-neighbour walk: B_i^{i-1} = L, B_i^{i+1} = R.

    The window edges are open sites; callers keep the support away from them.
    """
    L, R = nn_pair(L, R, tol)
    lo, hi = _window(window)
    n = hi - lo + 1
    kernels = np.stack([np.broadcast_to(L, (n,) + L.shape), np.broadcast_to(R, (n,) + R.shape)])
    walk = WalkSpec(dim=L.shape[0], lo=lo, hi=hi, offsets=(-1, 1), kernels=kernels, tol=tol, name=name, pair=(L, R))
    logger.debug(f"Built nearest-neighbour walk {name or '<unnamed>'} on [{lo}, {hi}]")
    return walk


def from_transitions(dim, window, transitions, tol=DEFAULT_TOL, name=''):
    """
    Walk from explicit transitions.

    Args:
        dim: internal dimension d
        window: (lo, hi)
        transitions: {(source, target): B_source^target} or iterable of triples

    Raises:
        WindowError: empty window or a source outside it
        DimensionError: a matrix that is not dim x dim
        CompletenessError: some window site whose effects do not sum to I
    """
    lo, hi = _window(window)
    items = transitions.items() if isinstance(transitions, dict) else ((tuple(t[:2]), t[2]) for t in transitions)
    entries = []
    for (source, target), B in items:
        source, target = int(source), int(target)
        if not lo <= source <= hi:
            raise WindowError(f"Transition source {source} lies outside the window [{lo}, {hi}]", source=source)
        B = as_matrix(B, square=True, name=f'B_{source}^{target}')
        if B.shape[0] != dim:
            raise DimensionError(f"B_{source}^{target} is {B.shape[0]}x{B.shape[0]}, expected {dim}x{dim}",
                                 source=source, target=target)
        entries.append((source, target, B))

    offsets = sorted({target - source for source, target, _ in entries})
    kernels = np.zeros((len(offsets), hi - lo + 1, dim, dim), dtype=complex)
    for source, target, B in entries:
        kernels[offsets.index(target - source), source - lo] += B
    walk = WalkSpec(dim=int(dim), lo=lo, hi=hi, offsets=tuple(offsets), kernels=kernels, tol=tol, name=name)
    return _check_complete(walk, tol)


def zero_state(walk):
    return WalkState(lo=walk.lo, blocks=np.zeros((walk.n_sites, walk.dim, walk.dim), dtype=complex))


def initial_state(walk, rho, site=0, tol=DEFAULT_TOL):
    """rho kron |site><site|; rho must be PSD, its trace is kept as given."""
    rho = positive_operator(rho, tol).mat
    if rho.shape[0] != walk.dim:
        raise DimensionError(f"Seed is {rho.shape[0]}x{rho.shape[0]} but the walk has d={walk.dim}",
                             seed_dim=rho.shape[0], walk_dim=walk.dim)
    if not walk.contains(site):
        raise WindowError(f"Site {site} lies outside the window [{walk.lo}, {walk.hi}]", site=site)
    blocks = np.zeros((walk.n_sites, walk.dim, walk.dim), dtype=complex)
    blocks[walk.index(site)] = rho
    return WalkState(lo=walk.lo, blocks=blocks)


def block_state(walk, blocks, tol=DEFAULT_TOL):
    """State from {site: block}."""
    out = np.zeros((walk.n_sites, walk.dim, walk.dim), dtype=complex)
    for site, block in blocks.items():
        if not walk.contains(int(site)):
            raise WindowError(f"Block at site {site} lies outside the window [{walk.lo}, {walk.hi}]", site=int(site))
        block = positive_operator(block, tol, name=f'block at {site}').mat
        if block.shape[0] != walk.dim:
            raise DimensionError(f"Block at site {site} is {block.shape[0]}x{block.shape[0]}, expected d={walk.dim}",
                                 site=int(site))
        out[walk.index(int(site))] = block
    return WalkState(lo=walk.lo, blocks=out)


def propagate(walk, blocks):
    """
    One application of the walk to a raw (..., n_sites, d, d) block array;
    leading axes are independent copies.

    Returns:
        tuple: (new blocks, trace that left the window, summed over copies)
    """
    n = walk.n_sites
    out = np.zeros_like(blocks)
    escaped = 0.0
    sources = np.arange(n)
    for offset, K in zip(walk.offsets, walk.kernels):
        moved = K @ blocks @ K.conj().transpose(0, 2, 1)
        targets = sources + offset
        inside = (targets >= 0) & (targets < n)
        out[..., targets[inside], :, :] += moved[..., inside, :, :]
        if not inside.all():
            escaped += float(np.einsum('...sii->', moved[..., ~inside, :, :]).real)
    return out, escaped


def step(walk, state, allow_escape=False):
    """
    Omega(state).

    Raises:
        WindowError: more than ``walk.tol`` of trace leaves the window and
            ``allow_escape`` is off
    """
    blocks, escaped = propagate(walk, state.blocks)
    if escaped > walk.tol and not allow_escape:
        raise WindowError(f"Mass {escaped:.3e} left the window [{walk.lo}, {walk.hi}]", escaped_mass=escaped)
    return WalkState(lo=walk.lo, blocks=blocks)


def run(walk, state, steps):
    """Apply :func:`step` ``steps`` times; returns the list of states after each step."""
    states = []
    for _ in range(steps):
        state = step(walk, state)
        states.append(state)
    return states


def check_margin(walk, origin, steps):
    """
    Require that ``steps`` steps from ``origin`` never touch an open site.

    For a nearest-neighbour walk this is window ⊇ [origin - steps - 1, origin + steps + 1].
    """
    if not walk.contains(origin):
        raise WindowError(f"Site {origin} lies outside the window [{walk.lo}, {walk.hi}]", site=origin)
    radius = walk.reach * steps
    close = [j for j in walk.open_sites if abs(j - origin) <= radius]
    if close:
        raise WindowError(
            f"Window [{walk.lo}, {walk.hi}] is too small for {steps} steps from site {origin}",
            window=[walk.lo, walk.hi],
            required=[origin - radius - 1, origin + radius + 1],
            open_sites=close[:10],
        )


def monitored_run(walk, rho0, origin=0, n_max=1, tol=DEFAULT_TOL, label=''):
    """
    Evolve rho0 kron |origin><origin|, projecting out the origin block after
    every step.

    Args:
        walk: WalkSpec
        rho0: density matrix placed at ``origin``
        origin: monitored site
        n_max: number of steps

    Returns:
        ReturnSeries

    Raises:
        ParameterError: n_max < 1 or rho0 not a density matrix
        WindowError: the window does not contain n_max steps of support
    """
    if int(n_max) < 1:
        raise ParameterError("n_max must be at least 1", n_max=int(n_max))
    n_max = int(n_max)
    rho0 = density_matrix(rho0, tol).mat
    check_margin(walk, origin, n_max)
    state = initial_state(walk, rho0, origin, tol)

    blocks = state.blocks.copy()
    o = walk.index(origin)
    survivors, removed, cumulative = [], [], []
    total = 0.0
    for n in range(1, n_max + 1):
        blocks, _ = propagate(walk, blocks)
        back = float(np.trace(blocks[o]).real)
        blocks[o] = 0
        total += back
        removed.append(back)
        cumulative.append(total)
        survivors.append(float(np.einsum('sii->', blocks).real))

    series = ReturnSeries(
        origin=origin,
        per_step_mass=tuple(survivors),
        removed=tuple(removed),
        cumulative_return=tuple(cumulative),
        initial_mass=float(np.trace(rho0).real),
        label=label,
    )
    logger.debug(f"Monitored run of {walk.name or '<walk>'} from {origin}: "
                 f"n_max={n_max}, return estimate {series.return_estimate:.12f}")
    return series


def recurrence_evidence(walk, origin=0, n_max=200, seed=0, n_random=20, tail_fraction=0.1):
    """
    Monitored runs for the finite test family of initial densities.

    A state's estimate R_hat = 1 - S_{n_max} is evidence only; the tail
    increment is the mass returned over the last ``tail_fraction`` of steps.

    Returns:
        list of dicts, one per test state
    """
    rows = []
    for label, rho in state_family(walk.dim, seed=seed, n_random=n_random):
        series = monitored_run(walk, rho, origin, n_max, label=label)
        rows.append({
            'state': label,
            'return_estimate': series.return_estimate,
            'surviving_mass': series.per_step_mass[-1],
            'tail_increment': series.tail_increment(tail_fraction),
        })
    worst = min(rows, key=lambda row: row['return_estimate'])
    logger.info(f"Recurrence evidence for {walk.name or '<walk>'}: lowest return estimate "
                f"{worst['return_estimate']:.6f} ({worst['state']}) over {len(rows)} states")
    return rows
