"""
PQ-matrices and PQ-channels.

In the row-major representation [Phi] of a channel on d x d matrices, the
coordinates k*(d+1) carry the diagonal of rho. A channel is PQ when [Phi]
never mixes diagonal and off-diagonal coordinates: the diagonal-to-diagonal
entries form a column-stochastic P and the rest splits into (d-1)^2 Q-blocks
of order d.
"""

import logging
from math import isqrt

import numpy as np
from django.conf import settings

from qchannels.utils import adjoint, compose, convex_mix, kraus_rep, make_channel, matrix_rep, tp_residual, validate
from core.exceptions import DimensionError, NotPQError, ParameterError, UnsupportedError
from core.utils import DEFAULT_TOL, as_matrix, mat_exp, max_abs

from .models import CandidateReport, PQDecomposition, SpectralClass

logger = logging.getLogger('pq')

# Split parts at or below this modulus are dropped from Kraus lists
SPLIT_DROP_TOL = 1e-14


def eigen_one_tol():
    return getattr(settings, 'PQWALK_EIGEN_ONE_TOL', 1e-8)


def is_pq_matrix(A, tol=DEFAULT_TOL):
    """At most one entry of modulus > tol in every row and every column."""
    mask = np.abs(as_matrix(A, square=True)) > tol
    return bool(np.all(mask.sum(axis=0) <= 1) and np.all(mask.sum(axis=1) <= 1))


def class_of(A, tol=DEFAULT_TOL):
    """
    Membership of a 2 x 2 matrix in PQ_2 and in the wider alpha/beta classes
    (all nonzero entries in one column / one row).

    Raises:
        UnsupportedError: A is not 2 x 2
    """
    A = as_matrix(A, square=True)
    if A.shape != (2, 2):
        raise UnsupportedError("alpha/beta PQ classes are defined for order 2 only", shape=list(A.shape))
    mask = np.abs(A) > tol
    pq = is_pq_matrix(A, tol)
    return {
        'pq': pq,
        'alpha_pq': pq or int(mask.any(axis=0).sum()) == 1,
        'beta_pq': pq or int(mask.any(axis=1).sum()) == 1,
    }


def rep_dim(M):
    """d for a d^2 x d^2 representation."""
    M = as_matrix(M, square=True, name='representation')
    d = isqrt(M.shape[0])
    if d * d != M.shape[0] or d < 2:
        raise DimensionError(f"Representation of size {M.shape[0]} is not d^2 x d^2 with d >= 2", size=M.shape[0])
    return d


def diagonal_indices(d):
    return np.arange(d) * (d + 1)


def offdiagonal_indices(d):
    return np.setdiff1d(np.arange(d * d), diagonal_indices(d))


def pq_masks(d):
    """Boolean d^2 x d^2 masks of the classical and quantum patterns."""
    diagonal = np.zeros(d * d, dtype=bool)
    diagonal[diagonal_indices(d)] = True
    classical = np.outer(diagonal, diagonal)
    quantum = np.outer(~diagonal, ~diagonal)
    return classical, quantum


def analyze_pq(M, tol=DEFAULT_TOL):
    """
    Extract P and the Q-blocks of ``M`` whether or not it is PQ.

    ``residual`` is the largest modulus outside the PQ pattern (plus any
    imaginary part of P); ``stochastic_residual`` measures negative entries of
    P and column sums away from 1.
    """
    M = as_matrix(M, square=True)
    d = rep_dim(M)
    classical, quantum = pq_masks(d)
    diag = diagonal_indices(d)
    off = offdiagonal_indices(d)

    P_complex = M[np.ix_(diag, diag)]
    P = P_complex.real
    Q = M[np.ix_(off, off)]
    Qblocks = Q.reshape(d - 1, d, d - 1, d).transpose(0, 2, 1, 3)

    residual = max(max_abs(M[~(classical | quantum)]), max_abs(P_complex.imag))
    stochastic_residual = max(float(max(0.0, -P.min())), max_abs(P.sum(axis=0) - 1))
    pq = residual <= tol and stochastic_residual <= tol
    return PQDecomposition(
        dim=d, P=P, Qblocks=Qblocks, residual=residual, stochastic_residual=stochastic_residual, pq=pq,
    )


def pq_pattern(M, tol=DEFAULT_TOL):
    """The PQ decomposition of ``M``, or None when ``M`` is not a PQ representation."""
    decomposition = analyze_pq(M, tol)
    if not decomposition.pq:
        logger.debug(f"Not PQ: residual {decomposition.residual:.3e}, stochastic {decomposition.stochastic_residual:.3e}")
        return None
    return decomposition


def _split(M):
    d = rep_dim(M)
    classical, quantum = pq_masks(d)
    return np.where(classical, M, 0), np.where(quantum, M, 0)


def split_PQ_matrices(M, tol=DEFAULT_TOL):
    """
    Masked classical and quantum parts [P], [Q] with [P] + [Q] = M.

    Raises:
        NotPQError: M is not a PQ representation
    """
    M = as_matrix(M, square=True)
    decomposition = analyze_pq(M, tol)
    if not decomposition.pq:
        raise NotPQError(
            "Representation is not of PQ form",
            residual=decomposition.residual,
            stochastic_residual=decomposition.stochastic_residual,
        )
    return _split(M)


def generator_split(ch, tol=DEFAULT_TOL):
    """
    Classical and quantum parts [R], [S] of the generator [Phi] - I of a
    unital PQ-channel.
    """
    M = _require_unital_pq(ch, tol)
    return _split(M - np.eye(M.shape[0]))


def pq_kraus_split_qubit(ch, tol=DEFAULT_TOL):
    """
    Replace each qubit Kraus operator by its diagonal and antidiagonal parts.

    The new list consists of PQ-matrices only and has the same representation
    whenever the channel is PQ.

    Raises:
        UnsupportedError: d != 2
        NotPQError: the channel is not PQ
    """
    if ch.dim != 2:
        raise UnsupportedError("Diagonal/antidiagonal split exists only for qubit channels", dim=ch.dim)
    decomposition = analyze_pq(matrix_rep(ch), tol)
    if not decomposition.pq:
        raise NotPQError("Channel is not a PQ-channel", residual=decomposition.residual)

    antidiagonal = np.array([[0, 1], [1, 0]], dtype=bool)
    parts = []
    for V in ch.kraus:
        for mask in (np.eye(2, dtype=bool), antidiagonal):
            part = np.where(mask, V, 0)
            if max_abs(part) > SPLIT_DROP_TOL:
                parts.append(part)
    logger.debug(f"Split {len(ch)} Kraus operators into {len(parts)} diagonal/antidiagonal parts")
    return make_channel(parts, max(tol, ch.tp_tol))


def verify_pq_kraus_candidate(ch, candidate, tol=DEFAULT_TOL):
    """
    Check that ``candidate`` is a PQ-matrix Kraus list of ``ch``.

    Never raises on a bad candidate: the report lists the non-PQ members and
    the representation and TP residuals.
    """
    candidate = [as_matrix(V, square=True, name='candidate') for V in candidate]
    if any(V.shape[0] != ch.dim for V in candidate):
        raise DimensionError("Candidate matrices do not match the channel dimension", dim=ch.dim)
    non_pq = [index for index, V in enumerate(candidate) if not is_pq_matrix(V, tol)]
    rep_residual = max_abs(sum(kraus_rep(V) for V in candidate) - matrix_rep(ch))
    tp = tp_residual(candidate)
    return CandidateReport(
        valid=not non_pq and rep_residual <= tol and tp <= tol,
        non_pq=non_pq,
        rep_residual=rep_residual,
        tp_residual=tp,
    )


def _require_unital_pq(ch, tol):
    report = validate(ch)
    M = matrix_rep(ch)
    if not report.unital:
        raise UnsupportedError("Channel is not unital", unital_residual=report.unital_residual)
    if pq_pattern(M, tol) is None:
        raise UnsupportedError("Channel is not a PQ-channel", residual=analyze_pq(M, tol).residual)
    return M


def semigroup_point(ch, t, tol=DEFAULT_TOL):
    """
    exp(t([Phi] - I)) for a unital PQ-channel; a PQ-channel representation for
    every t >= 0.

    Raises:
        UnsupportedError: channel not unital or not PQ
        ParameterError: t < 0
    """
    if t < 0:
        raise ParameterError("Semigroup time must be nonnegative", t=t)
    M = _require_unital_pq(ch, tol)
    return mat_exp(M - np.eye(M.shape[0]), t)


def _fixed_dim(A, tol):
    """Dimension of the eigenvalue-1 eigenspace of A."""
    if A.size == 0:
        return 0
    singular = np.linalg.svd(A - np.eye(A.shape[0]), compute_uv=False)
    return int(np.sum(singular <= tol))


def classify_spectral(ch, tol=DEFAULT_TOL, eigen_tol=None):
    """
    Spectral class of a PQ-channel.

    ergodic iff P has a one-dimensional fixed space and Q has no eigenvalue 1.
    Mixing is only decided for unital qubit channels with real Q, where it
    holds iff Phi* Phi is ergodic; elsewhere it is None.

    Raises:
        NotPQError: the channel is not PQ
    """
    eigen_tol = eigen_one_tol() if eigen_tol is None else eigen_tol
    M = matrix_rep(ch)
    decomposition = analyze_pq(M, tol)
    if not decomposition.pq:
        raise NotPQError("Channel is not a PQ-channel", residual=decomposition.residual)

    P, Q = decomposition.P, decomposition.Q
    p_spectrum = np.linalg.eigvals(P)
    q_spectrum = np.linalg.eigvals(Q)
    p_fixed_dim = _fixed_dim(P, eigen_tol)
    q_has_fixed = bool(np.any(np.abs(q_spectrum - 1) <= eigen_tol))
    ergodic = p_fixed_dim == 1 and not q_has_fixed
    normal_rep = max_abs(M.conj().T @ M - M @ M.conj().T) <= tol

    mixing = None
    if ch.dim == 2 and validate(ch).unital and max_abs(Q.imag) <= tol:
        mixing = classify_spectral(compose(adjoint(ch), ch), tol, eigen_tol).ergodic

    logger.info(f"Spectral class: p_fixed_dim={p_fixed_dim}, q_has_fixed={q_has_fixed}, ergodic={ergodic}, mixing={mixing}")
    return SpectralClass(
        p_fixed_dim=p_fixed_dim,
        q_has_fixed=q_has_fixed,
        ergodic=ergodic,
        normal_rep=normal_rep,
        mixing=mixing,
        p_spectrum=[complex(z) for z in p_spectrum],
        q_spectrum=[complex(z) for z in q_spectrum],
    )


def mixed_unitary_qubit(p11, p12, a=0.0, b=0.0, c=0.0, d=0.0, f=0.0, g=0.0, h=0.0, j=0.0):
    """
    p11 * Phi_D + p12 * Phi_A where Phi_D averages conjugation by
    diag(e^{ia}, e^{ib}) and diag(e^{ic}, e^{id}) and Phi_A averages
    conjugation by the antidiagonal unitaries with phases (f, g) and (h, j).
    """
    U1 = np.diag([np.exp(1j * a), np.exp(1j * b)])
    U2 = np.diag([np.exp(1j * c), np.exp(1j * d)])
    U3 = np.array([[0, np.exp(1j * f)], [np.exp(1j * g), 0]])
    U4 = np.array([[0, np.exp(1j * h)], [np.exp(1j * j), 0]])
    phi_d = convex_mix([0.5, 0.5], [make_channel([U1]), make_channel([U2])])
    phi_a = convex_mix([0.5, 0.5], [make_channel([U3]), make_channel([U4])])
    return convex_mix([p11, p12], [phi_d, phi_a])


def _phase_pair(q, weight, tol):
    """Angles t1, t2 with weight * (e^{i t1} + e^{i t2}) / 2 = q."""
    if weight <= tol:
        if abs(q) > tol:
            return None
        return 0.0, 0.0
    ratio = abs(q) / weight
    if ratio > 1 + tol:
        return None
    spread = np.arccos(min(ratio, 1.0))
    centre = np.angle(q)
    return centre + spread, centre - spread


def fit_unitary_decomposition(ch, tol=DEFAULT_TOL):
    """
    Phases reproducing a unital qubit PQ-channel as a mixture of diagonal and
    antidiagonal unitary conjugations.

    Returns:
        tuple: (channel built by :func:`mixed_unitary_qubit`, parameter dict)

    Raises:
        UnsupportedError: not a unital qubit PQ-channel, or |q11| > p11 or |q12| > p12
    """
    if ch.dim != 2:
        raise UnsupportedError("Unitary decomposition is implemented for qubits only", dim=ch.dim)
    decomposition = analyze_pq(_require_unital_pq(ch, tol), tol)
    p11 = min(max(float(decomposition.P[0, 0]), 0.0), 1.0)
    p12 = 1.0 - p11
    diagonal = _phase_pair(decomposition.q11, p11, tol)
    antidiagonal = _phase_pair(decomposition.q12, p12, tol)
    if diagonal is None or antidiagonal is None:
        raise UnsupportedError(
            "Coherences exceed the reach of diagonal/antidiagonal unitary mixtures",
            q11=abs(decomposition.q11), p11=p11, q12=abs(decomposition.q12), p12=p12,
        )
    params = {
        'p11': p11, 'p12': p12,
        'a': diagonal[0], 'b': 0.0, 'c': diagonal[1], 'd': 0.0,
        'f': antidiagonal[0], 'g': 0.0, 'h': antidiagonal[1], 'j': 0.0,
    }
    return mixed_unitary_qubit(**params), params


def pq_power_identity_residual(M, n):
    """max-norm of M^n - ([P]^n + [Q]^n)."""
    P_part, Q_part = _split(as_matrix(M, square=True))
    power = np.linalg.matrix_power
    return max_abs(power(M, n) - (power(P_part, n) + power(Q_part, n)))

