"""
Dense complex linear algebra used by every other app.

vec is row-major: vec([[a11, a12], [a21, a22]]) = [a11, a12, a21, a22], so
that vec(A X B^T) = (A kron B) vec(X) and a Kraus map V X V* acts on vec(X)
as V kron conj(V).
"""

import logging

import numpy as np
from scipy import linalg
from scipy.stats import unitary_group

from .exceptions import DimensionError, ParameterError
from .models import DensityMatrix, PositiveOperator, PSDReport

logger = logging.getLogger('core')

DEFAULT_TOL = 1e-10


def as_matrix(A, square=False, name='matrix'):
    """
    Coerce ``A`` to a 2-D complex ndarray.

    Args:
        A: array-like
        square: require rows == cols
        name: used in error messages

    Returns:
        np.ndarray: complex copy of A
    """
    M = np.array(A, dtype=complex)
    if M.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional", shape=list(M.shape))
    if square and M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square", shape=list(M.shape))
    return M


def vec(A):
    """Row-major flattening of ``A``."""
    return as_matrix(A).reshape(-1)


def unvec(v, d):
    """
    Inverse of :func:`vec` for square matrices.

    Raises:
        DimensionError: when ``len(v) != d * d``
    """
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != d * d:
        raise DimensionError(f"Vector of length {v.size} cannot be reshaped to {d}x{d}", length=int(v.size), dim=d)
    return v.reshape(d, d).copy()


def kron(A, B):
    return np.kron(as_matrix(A), as_matrix(B))


def max_abs(A):
    """Max-norm: the largest entry modulus (0 for empty input)."""
    A = np.asarray(A)
    return float(np.max(np.abs(A))) if A.size else 0.0


def hermitian_part(A):
    A = as_matrix(A, square=True)
    return (A + A.conj().T) / 2


def psd_report(A, tol=DEFAULT_TOL):
    """
    Check Hermiticity and positivity of ``A``.

    Args:
        A: square matrix
        tol: tolerance for both the Hermiticity residual and the smallest eigenvalue

    Returns:
        PSDReport: min_eig is the smallest eigenvalue of the Hermitian part
    """
    A = as_matrix(A, square=True)
    hermitian = max_abs(A - A.conj().T) <= tol
    min_eig = float(linalg.eigvalsh(hermitian_part(A))[0])
    return PSDReport(hermitian=hermitian, min_eig=min_eig, psd=hermitian and min_eig >= -tol)


def mat_exp(A, t=1.0):
    """exp(tA) by scaling and squaring with Pade approximants."""
    A = as_matrix(A, square=True)
    return linalg.expm(t * A)


def spectrum(A):
    return linalg.eigvals(as_matrix(A, square=True))


def spectra_match(a, b, tol=1e-8):
    """
    Compare two eigenvalue lists as multisets.

    Matching is greedy nearest-neighbour, which is exact whenever clusters are
    separated by more than ``2 * tol``.
    """
    a = list(np.asarray(a, dtype=complex))
    b = list(np.asarray(b, dtype=complex))
    if len(a) != len(b):
        return False
    for value in a:
        distances = [abs(value - other) for other in b]
        best = int(np.argmin(distances))
        if distances[best] > tol:
            return False
        b.pop(best)
    return True


def density_matrix(A, tol=DEFAULT_TOL, name='rho'):
    """
    Validate ``A`` as a density matrix.

    Raises:
        ParameterError: not Hermitian, not PSD or trace not 1
    """
    A = as_matrix(A, square=True, name=name)
    report = psd_report(A, tol)
    trace = complex(np.trace(A))
    if not report.psd or abs(trace - 1) > tol:
        raise ParameterError(
            f"{name} is not a density matrix",
            hermitian=report.hermitian,
            min_eig=report.min_eig,
            trace=trace.real,
        )
    return DensityMatrix(mat=A, tol=tol)


def positive_operator(A, tol=DEFAULT_TOL, name='rho'):
    """Validate ``A`` as a PSD block; trace is unrestricted."""
    A = as_matrix(A, square=True, name=name)
    report = psd_report(A, tol)
    if not report.psd:
        raise ParameterError(f"{name} is not positive semidefinite", hermitian=report.hermitian, min_eig=report.min_eig)
    return PositiveOperator(mat=hermitian_part(A))


def conjugate(V, rho):
    """V rho V*."""
    return V @ rho @ V.conj().T


def random_unitary(d, rng):
    return unitary_group.rvs(d, random_state=rng)


def random_density(d, rng, rank=None):
    """
    Haar-induced random density matrix of the given rank (full rank by default).
    """
    rank = rank or d
    G = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_pq_matrix(d, rng, zero_prob=0.0):
    """
    Random permutation of a random complex diagonal matrix.

    Args:
        d: order
        rng: numpy Generator
        zero_prob: probability that each diagonal entry is zeroed
    """
    diagonal = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    if zero_prob:
        diagonal[rng.random(d) < zero_prob] = 0
    permutation = np.eye(d)[rng.permutation(d)]
    return permutation @ np.diag(diagonal)


def basis_states(d):
    """Pure states |i><i| for i < d."""
    states = []
    for i in range(d):
        rho = np.zeros((d, d), dtype=complex)
        rho[i, i] = 1
        states.append(rho)
    return states


def state_family(d, seed=0, n_random=20):
    """
    Finite stand-in for "every density matrix": basis pure states, the
    maximally mixed state and ``n_random`` seeded random densities.

    Returns:
        list of (label, matrix) pairs
    """
    rng = np.random.default_rng(seed)
    family = [(f'basis_{i}', rho) for i, rho in enumerate(basis_states(d))]
    family.append(('maximally_mixed', np.eye(d, dtype=complex) / d))
    family.extend((f'random_{n}', random_density(d, rng)) for n in range(n_random))
    logger.debug(f"Built test state family of size {len(family)} for d={d}, seed={seed}")
    return family
