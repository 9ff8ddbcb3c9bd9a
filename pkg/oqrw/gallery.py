"""
Named nearest-neighbour pairs (L, R).
"""

import logging

import numpy as np

from core.exceptions import ParameterError

from .utils import make_nn_walk

logger = logging.getLogger('oqrw')


def _unit(value, name, open_interval=False):
    value = float(value)
    ok = 0 < value < 1 if open_interval else 0 <= value <= 1
    if not ok:
        interval = '(0, 1)' if open_interval else '[0, 1]'
        raise ParameterError(f"{name} must lie in {interval}", **{name: value})
    return value


def classical(p=0.5):
    """Classical walk moving left with probability p."""
    p = _unit(p, 'p', open_interval=True)
    I = np.eye(2, dtype=complex)
    return np.sqrt(p) * I, np.sqrt(1 - p) * I


def case1(l11sq=0.5, l22sq=0.5, theta=0.0, phi=0.0):
    """Diagonal L and R; theta and phi are phases on the entries of L."""
    a = _unit(l11sq, 'l11sq')
    b = _unit(l22sq, 'l22sq')
    L = np.diag([np.exp(1j * float(theta)) * np.sqrt(a), np.exp(1j * float(phi)) * np.sqrt(b)])
    R = np.diag([np.sqrt(1 - a), np.sqrt(1 - b)]).astype(complex)
    return L, R


def case2(x=0.5, y=0.5):
    """Antidiagonal L and R with |l21|^2 = x and |r12|^2 = y."""
    x = _unit(x, 'x')
    y = _unit(y, 'y')
    L = np.array([[0, np.sqrt(1 - y)], [np.sqrt(x), 0]], dtype=complex)
    R = np.array([[0, np.sqrt(y)], [np.sqrt(1 - x), 0]], dtype=complex)
    return L, R


def case3(x=0.5, y=None):
    """Diagonal L = diag(sqrt(x), sqrt(y)), antidiagonal R; unital when y = x."""
    x = _unit(x, 'x')
    y = x if y is None else _unit(y, 'y')
    L = np.diag([np.sqrt(x), np.sqrt(y)]).astype(complex)
    R = np.array([[0, np.sqrt(1 - y)], [np.sqrt(1 - x), 0]], dtype=complex)
    return L, R


def amplitude_damping(p=0.5):
    """L and R are the two amplitude-damping Kraus matrices."""
    p = _unit(p, 'p', open_interval=True)
    L = np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex)
    R = np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex)
    return L, R


def hadamard_split():
    """
    Non-PQ pair whose sum is the Hadamard matrix: R = B, L = C with C*B = 0.
    """
    B = np.array([[1, 1], [0, 0]], dtype=complex) / np.sqrt(2)
    C = np.array([[0, 0], [1, -1]], dtype=complex) / np.sqrt(2)
    return C, B


WALKS = {
    'classical': (classical, ('p',)),
    'case1': (case1, ('l11sq', 'l22sq', 'theta', 'phi')),
    'case2': (case2, ('x', 'y')),
    'case3': (case3, ('x', 'y')),
    'amplitude_damping': (amplitude_damping, ('p',)),
    'hadamard_split': (hadamard_split, ()),
}


def walk_pair(name, params=None):
    """
    (L, R) of a named walk.

    Raises:
        ParameterError: unknown name or parameter
    """
    params = dict(params or {})
    if name not in WALKS:
        raise ParameterError(f"Unknown gallery walk '{name}'", name=name, choices=sorted(WALKS))
    builder, accepted = WALKS[name]
    unknown = sorted(set(params) - set(accepted))
    if unknown:
        raise ParameterError(f"Unknown parameters for {name}: {', '.join(unknown)}", accepted=list(accepted))
    return builder(**params)


def walk_gallery(name, params=None, window=(-50, 50)):
    """Named walk on ``window``."""
    L, R = walk_pair(name, params)
    label = name if not params else f"{name}({', '.join(f'{k}={v}' for k, v in sorted(params.items()))})"
    return make_nn_walk(L, R, window, name=label)
