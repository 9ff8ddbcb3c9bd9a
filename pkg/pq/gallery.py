"""
Named channels with their textbook Kraus matrices.

All qubit channels except the generic unitary conjugation are PQ-channels;
``landau_streater`` and ``cnot2`` are the d = 3 and two-qubit examples.
"""

import logging

import numpy as np

from qchannels.utils import make_channel
from core.exceptions import ParameterError

logger = logging.getLogger('pq')

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _probability(p, name='p'):
    p = float(p)
    if not 0 < p < 1:
        raise ParameterError(f"{name} must lie in (0, 1)", **{name: p})
    return p


def identity(d=2):
    return make_channel([np.eye(int(d), dtype=complex)])


def bit_flip(p):
    p = _probability(p)
    return make_channel([np.sqrt(p) * I2, np.sqrt(1 - p) * X])


def phase_flip(p):
    p = _probability(p)
    return make_channel([np.sqrt(p) * I2, np.sqrt(1 - p) * Z])


def bit_phase_flip(p):
    p = _probability(p)
    return make_channel([np.sqrt(p) * I2, np.sqrt(1 - p) * Y])


def amplitude_damping(p):
    p = _probability(p)
    V1 = np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex)
    V2 = np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex)
    return make_channel([V1, V2])


def phase_damping(p):
    p = _probability(p)
    V1 = np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex)
    V2 = np.array([[0, 0], [0, np.sqrt(p)]], dtype=complex)
    return make_channel([V1, V2])


def depolarizing(p):
    p = _probability(p)
    return make_channel([
        np.sqrt(1 - 3 * p / 4) * I2,
        np.sqrt(p) / 2 * X,
        np.sqrt(p) / 2 * Y,
        np.sqrt(p) / 2 * Z,
    ])


def qubit_unitary(alpha=0.0, beta=0.0, gamma=0.0, theta=0.0):
    """
    General 2 x 2 unitary

        [[ e^{i alpha} cos t,          e^{i gamma} sin t         ],
         [-e^{i(beta - gamma)} sin t,  e^{i(beta - alpha)} cos t ]]
    """
    c, s = np.cos(theta), np.sin(theta)
    return np.array([
        [np.exp(1j * alpha) * c, np.exp(1j * gamma) * s],
        [-np.exp(1j * (beta - gamma)) * s, np.exp(1j * (beta - alpha)) * c],
    ])


def unitary_qubit(alpha=0.0, beta=0.0, gamma=0.0, theta=0.0):
    """Conjugation by :func:`qubit_unitary`; PQ exactly when sin(2 theta) = 0."""
    return make_channel([qubit_unitary(float(alpha), float(beta), float(gamma), float(theta))])


def landau_streater_kraus():
    V1 = np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]]) / np.sqrt(2)
    V2 = np.array([[0, 0, -1j], [0, 0, -1j], [1j, 1j, 0]]) / 2
    V3 = np.array([[0, 0, 1j], [0, 0, -1j], [-1j, 1j, 0]]) / 2
    return [V1, V2, V3]


def landau_streater_pq_candidate():
    """
    PQ-matrix Kraus list of the Landau-Streater channel: V1 plus the split
    V2 = V2a + V2b, V3 = V3a + V3b.
    """
    V1 = landau_streater_kraus()[0]
    V2a = np.array([[0, 0, -1j], [0, 0, 0], [1j, 0, 0]]) / 2
    V2b = np.array([[0, 0, 0], [0, 0, -1j], [0, 1j, 0]]) / 2
    V3a = np.array([[0, 0, 1j], [0, 0, 0], [-1j, 0, 0]]) / 2
    V3b = np.array([[0, 0, 0], [0, 0, -1j], [0, 1j, 0]]) / 2
    return [V1, V2a, V2b, V3a, V3b]


def landau_streater():
    return make_channel(landau_streater_kraus())


def cnot2(p):
    """Two-qubit channel mixing CNOT-type permutations with weights p and r = 1 - p."""
    p = _probability(p)
    C1 = np.eye(4)[[0, 1, 3, 2]]
    C2 = np.eye(4)[[0, 3, 2, 1]]
    return make_channel([np.sqrt(p) * C1, np.sqrt(1 - p) * C2])


GALLERY = {
    'identity': (identity, ('d',)),
    'bit_flip': (bit_flip, ('p',)),
    'phase_flip': (phase_flip, ('p',)),
    'bit_phase_flip': (bit_phase_flip, ('p',)),
    'amplitude_damping': (amplitude_damping, ('p',)),
    'phase_damping': (phase_damping, ('p',)),
    'depolarizing': (depolarizing, ('p',)),
    'unitary_qubit': (unitary_qubit, ('alpha', 'beta', 'gamma', 'theta')),
    'landau_streater': (landau_streater, ()),
    'cnot2': (cnot2, ('p',)),
}


def gallery(name, params=None):
    """
    Instantiate a named channel.

    Args:
        name: one of GALLERY
        params: dict of keyword parameters, e.g. {'p': 0.4}

    Raises:
        ParameterError: unknown name, unknown or missing parameter, or p outside (0, 1)
    """
    params = dict(params or {})
    if name not in GALLERY:
        raise ParameterError(f"Unknown gallery channel '{name}'", name=name, choices=sorted(GALLERY))
    builder, accepted = GALLERY[name]
    unknown = sorted(set(params) - set(accepted))
    if unknown:
        raise ParameterError(f"Unknown parameters for {name}: {', '.join(unknown)}", accepted=list(accepted))
    try:
        channel = builder(**params)
    except TypeError:
        raise ParameterError(f"Missing parameters for {name}", accepted=list(accepted), given=sorted(params))
    logger.debug(f"Built gallery channel {name} with {params}")
    return channel
