"""
Closed-form first-return probabilities for nearest-neighbour qubit walks
built from PQ-matrices, and the recurrence verdict they lead to.

Case 1: L, R diagonal. Case 2: L, R antidiagonal. Case 3: L diagonal and R
antidiagonal (the mirrored pair is the same walk seen in a mirror). In every
case tr(w rho w*) only sees the diagonal of rho, so the probabilities
depend on squared moduli alone.
"""

import logging

import numpy as np
from scipy import optimize

from core.exceptions import CompletenessError, DimensionError, ParameterError, UnsupportedError
from core.utils import DEFAULT_TOL, as_matrix, density_matrix, max_abs
from pq.utils import is_pq_matrix

from .combinatorics import alpha, case2_counts, case2_return_terms, case3_counts, check_cap, positive_int
from .utils import pair_residual

logger = logging.getLogger('oqrw')

CASE_PARAMS = {
    1: ('l11sq', 'l22sq'),
    2: ('x', 'y'),
    3: ('x',),
}

# case2_fk_max enumerates counts, so k stays small
FK_MAX_K = 8


def _squared_modulus(params, key):
    if key not in params:
        raise ParameterError(f"Missing parameter {key}", missing=key)
    value = float(params[key])
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{key} must lie in [0, 1]", **{key: value})
    return value


def _diagonal(rho0):
    rho = density_matrix(rho0, name='rho0').mat
    if rho.shape[0] != 2:
        raise DimensionError("Case formulas are for qubit walks", dim=rho.shape[0])
    return float(rho[0, 0].real), float(rho[1, 1].real)


def _case3_x(params, tol=DEFAULT_TOL):
    x = _squared_modulus(params, 'x')
    if 'y' in params:
        y = _squared_modulus(params, 'y')
        if abs(x - y) > tol:
            raise UnsupportedError(
                "Case 3 with |l11|^2 != |l22|^2 is not unital; use case3_formula or first_return_exact",
                x=x, y=y,
            )
    return x


def case_formula(case, params, rho0, k, cap=None):
    """
    Probability of a first return at time 2k from the closed forms.

    Args:
        case: 1, 2 or 3
        params: squared moduli; case 1 {'l11sq', 'l22sq'}, case 2
            {'x': |l21|^2, 'y': |r12|^2}, case 3 {'x'} (an optional 'y' must equal x)
        rho0: initial qubit density
        k: half-time

    Raises:
        UnsupportedError: case 3 with x != y
        ParameterError: unknown case, missing parameter or modulus outside [0, 1]
    """
    k = positive_int(k)
    r11, r22 = _diagonal(rho0)
    if case == 1:
        a = _squared_modulus(params, 'l11sq')
        b = _squared_modulus(params, 'l22sq')
        return alpha(k) * ((a * (1 - a)) ** k * r11 + (b * (1 - b)) ** k * r22)
    if case == 2:
        check_cap(k, cap)
        x = _squared_modulus(params, 'x')
        y = _squared_modulus(params, 'y')
        total = 0.0
        for b, count in case2_counts(k).items():
            from_first = (1 - x) ** b * y ** (k - b) * x ** (k - b) * (1 - y) ** b
            from_second = y ** b * (1 - x) ** (k - b) * (1 - y) ** (k - b) * x ** b
            total += count * (from_first * r11 + from_second * r22)
        return total
    if case == 3:
        x = _case3_x(params)
        return alpha(k) * (x * (1 - x)) ** k
    raise ParameterError(f"Unknown case {case}", case=case, choices=sorted(CASE_PARAMS))


def case3_formula(x, y, rho0, k, cap=None):
    """
    Case 3 first-return probability without the unitality assumption.

    L = diag(sqrt(x), sqrt(y)) keeps the basis state and R flips it, so a
    word with c left moves taken from the first basis state weighs
    x^c y^(k-c) (1-x)^ceil(k/2) (1-y)^floor(k/2); the #Q_{c,2k} counts do the rest.
    """
    k = positive_int(k)
    check_cap(k, cap)
    x = _squared_modulus({'x': x}, 'x')
    y = _squared_modulus({'y': y}, 'y')
    r11, r22 = _diagonal(rho0)
    up, down = (k + 1) // 2, k // 2
    total = 0.0
    for c, count in case3_counts(k).items():
        from_first = x ** c * y ** (k - c) * (1 - x) ** up * (1 - y) ** down
        from_second = y ** c * x ** (k - c) * (1 - y) ** up * (1 - x) ** down
        total += count * (from_first * r11 + from_second * r22)
    return total


def classical_return_terms(x, K):
    """
    alpha(k) (x(1-x))^k for k = 1..K through the ratio
    alpha(k+1) / alpha(k) = 2(2k-1)/(k+1), so no large integers appear.
    """
    K = positive_int(K, 'K')
    z = x * (1 - x)
    terms = np.empty(K)
    term = 2 * z
    for k in range(1, K + 1):
        terms[k - 1] = term
        term *= 2 * (2 * k - 1) / (k + 1) * z
    return terms


def classical_return_series(x, K):
    """Partial sums of :func:`classical_return_terms`."""
    return np.cumsum(classical_return_terms(x, K))


def classical_return_limit(x):
    """sum_k alpha(k) (x(1-x))^k = 1 - |1 - 2x|."""
    return 1 - abs(1 - 2 * x)


def case_return_series(case, params, rho0, K):
    """
    Cumulative first-return probability up to time 2k, k = 1..K.

    Case 2 uses the height recursion, so K is not limited by enumeration.
    """
    K = positive_int(K, 'K')
    r11, r22 = _diagonal(rho0)
    if case == 1:
        a = _squared_modulus(params, 'l11sq')
        b = _squared_modulus(params, 'l22sq')
        terms = r11 * classical_return_terms(a, K) + r22 * classical_return_terms(b, K)
    elif case == 2:
        terms = case2_return_terms(_squared_modulus(params, 'x'), _squared_modulus(params, 'y'), K)
    elif case == 3:
        terms = classical_return_terms(_case3_x(params), K)
    else:
        raise ParameterError(f"Unknown case {case}", case=case, choices=sorted(CASE_PARAMS))
    return np.cumsum(terms)


def case2_f(k, x, y):
    """f_k(x, y) = sum_b #P_{b,2k} x^b (1-x)^(k-b) y^b (1-y)^(k-b); broadcasts over x, y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    total = np.zeros(np.broadcast(x, y).shape)
    for b, count in case2_counts(k).items():
        total = total + count * (x * y) ** b * ((1 - x) * (1 - y)) ** (k - b)
    return total


def case2_fk_max(k, grid=101):
    """
    Maximise f_k over [0, 1]^2: grid search, then L-BFGS-B from the best
    grid point. The refined point replaces the grid point only when it is
    strictly better.

    Returns:
        dict with 'k', 'maximizer' [x, y] and 'value'
    """
    k = positive_int(k)
    if k > FK_MAX_K:
        raise ParameterError(f"k must be at most {FK_MAX_K}", k=k)
    axis = np.linspace(0.0, 1.0, grid)
    X, Y = np.meshgrid(axis, axis, indexing='ij')
    values = case2_f(k, X, Y)
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    best = np.array([axis[i], axis[j]])
    best_value = float(values[i, j])

    result = optimize.minimize(
        lambda v: -float(case2_f(k, v[0], v[1])),
        best,
        method='L-BFGS-B',
        bounds=[(0.0, 1.0), (0.0, 1.0)],
        options={'ftol': 1e-15, 'gtol': 1e-12},
    )
    if result.success and -result.fun > best_value + 1e-14:
        best = np.clip(result.x, 0.0, 1.0)
        best_value = -float(result.fun)
    logger.debug(f"f_{k} maximised at {best.tolist()} with value {best_value:.15f}")
    return {'k': k, 'maximizer': [float(best[0]), float(best[1])], 'value': best_value}


def _diagonal_like(A, tol):
    return max_abs(A - np.diag(np.diag(A))) <= tol


def _antidiagonal_like(A, tol):
    return max_abs(np.diag(np.diag(A))) <= tol


def _sq(M, i, j):
    return float(abs(M[i, j]) ** 2)


def _is_half(value, tol):
    return abs(value - 0.5) <= tol


def theorem51_verdict(L, R, tol=DEFAULT_TOL):
    """
    Recurrence of the origin for a unital qubit walk whose L and R are PQ-matrices.

    Case 1 and case 3 are recurrent exactly when the nonzero entries all
    have squared modulus 1/2. In case 2 the walk alternates between two
    step biases, 1 - 2|l21|^2 at odd times and 2|r12|^2 - 1 at even times,
    and it is recurrent exactly when they cancel, |l21|^2 = |r12|^2; the
    all-one-half point is one such balance.

    Returns:
        dict with 'recurrent', 'case', 'reason', 'criterion', the squared moduli and
        'all_half', whether every one of them equals 1/2

    Raises:
        UnsupportedError: dimension other than 2, a non-PQ matrix or a non-unital pair
        CompletenessError: L*L + R*R is not the identity
    """
    L = as_matrix(L, name='L')
    R = as_matrix(R, name='R')
    if L.shape != (2, 2) or R.shape != (2, 2):
        raise UnsupportedError("The recurrence criterion covers 2x2 transitions only",
                               L=list(L.shape), R=list(R.shape))
    residual = pair_residual(L, R)
    if residual > tol:
        raise CompletenessError(f"L*L + R*R is not the identity (residual {residual:.3e})", residual=residual)
    non_pq = [name for name, M in (('L', L), ('R', R)) if not is_pq_matrix(M, tol)]
    if non_pq:
        raise UnsupportedError("Transitions are not PQ-matrices; use monitored_run evidence instead", non_pq=non_pq)
    unital = max_abs(L @ L.conj().T + R @ R.conj().T - np.eye(2))
    if unital > tol:
        raise UnsupportedError("The pair is not unital; use monitored_run evidence instead", unital_residual=unital)

    mirrored = False
    if _diagonal_like(L, tol) and _diagonal_like(R, tol):
        case = 1
        params = {'l11sq': _sq(L, 0, 0), 'l22sq': _sq(L, 1, 1)}
        recurrent = _is_half(params['l11sq'], tol) and _is_half(params['l22sq'], tol)
        criterion = 'squared moduli equal 1/2'
    elif _antidiagonal_like(L, tol) and _antidiagonal_like(R, tol):
        case = 2
        params = {'x': _sq(L, 1, 0), 'y': _sq(R, 0, 1)}
        recurrent = abs(params['x'] - params['y']) <= tol
        criterion = '|l21|^2 equals |r12|^2'
    else:
        case = 3
        if _diagonal_like(R, tol):
            L, R = R, L
            mirrored = True
        params = {'x': _sq(L, 0, 0)}
        recurrent = _is_half(params['x'], tol)
        criterion = 'squared moduli equal 1/2'

    all_half = all(_is_half(value, tol) for value in params.values())
    reason = (f"case {case}{' (mirrored)' if mirrored else ''}: "
              f"{'satisfies' if recurrent else 'violates'} {criterion}")
    logger.info(f"Recurrence verdict: {'recurrent' if recurrent else 'transient'}, {reason}")
    return {
        'recurrent': bool(recurrent),
        'case': case,
        'mirrored': mirrored,
        'params': params,
        'criterion': criterion,
        'all_half': bool(all_half),
        'reason': reason,
    }


def tracial_dependence(V, rho, rng, trials=20, tol=DEFAULT_TOL):
    """
    Does tr(V rho V*) move when the off-diagonal part of rho is redrawn?

    For a PQ-matrix it never does.

    Returns:
        dict with 'dependent' and 'max_deviation'
    """
    V = as_matrix(V, square=True, name='V')
    rho = as_matrix(rho, square=True, name='rho')
    d = rho.shape[0]
    base = float(np.trace(V @ rho @ V.conj().T).real)
    off = ~np.eye(d, dtype=bool)
    deviation = 0.0
    for _ in range(trials):
        G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        H = (G + G.conj().T) / 2
        varied = rho.copy()
        varied[off] = H[off]
        value = float(np.trace(V @ varied @ V.conj().T).real)
        deviation = max(deviation, abs(value - base))
    return {'dependent': deviation > tol, 'max_deviation': deviation}
