"""
Construction and algebra of Kraus-form channels.

The matrix representation [Phi] = sum_i V_i kron conj(V_i) acts on row-major
vec(rho); it does not depend on which Kraus list realises the channel, so
channels are compared through it and Kraus lists are never canonicalized.
"""

import logging

import numpy as np

from core.exceptions import DimensionError, ParameterError, TracePreservationError, WeightError
from core.utils import DEFAULT_TOL, as_matrix, max_abs, unvec, vec

from .models import ChannelReport, KrausChannel

logger = logging.getLogger('qchannels')


def _kraus_list(kraus):
    if len(kraus) == 0:
        raise DimensionError("Kraus list is empty")
    matrices = [as_matrix(V, square=True, name='Kraus operator') for V in kraus]
    dims = {V.shape[0] for V in matrices}
    if len(dims) != 1:
        raise DimensionError("Kraus operators have different dimensions", dims=sorted(dims))
    return matrices


def tp_residual(kraus):
    """Max-norm deviation of sum V*V from the identity."""
    d = kraus[0].shape[0]
    return max_abs(sum(V.conj().T @ V for V in kraus) - np.eye(d))


def unital_residual(kraus):
    """Max-norm deviation of sum V V* from the identity."""
    d = kraus[0].shape[0]
    return max_abs(sum(V @ V.conj().T for V in kraus) - np.eye(d))


def make_channel(kraus, tol=DEFAULT_TOL):
    """
    Build a validated trace-preserving channel.

    Args:
        kraus: list of d x d matrices
        tol: allowed max-norm residual of sum V*V - I

    Returns:
        KrausChannel

    Raises:
        DimensionError: non-square or mixed dimensions
        TracePreservationError: residual above tol
    """
    matrices = _kraus_list(kraus)
    residual = tp_residual(matrices)
    if residual > tol:
        logger.warning(f"Rejected Kraus list of length {len(matrices)}: TP residual {residual:.3e}")
        raise TracePreservationError(
            f"Kraus operators are not trace preserving (residual {residual:.3e})",
            residual=residual,
        )
    return KrausChannel(dim=matrices[0].shape[0], kraus=tuple(matrices), tp_tol=tol)


def make_cp_map(kraus):
    """Unchecked constructor for CP maps that need not preserve trace."""
    matrices = _kraus_list(kraus)
    return KrausChannel(dim=matrices[0].shape[0], kraus=tuple(matrices), non_tp=True)


def unitary_channel(U, tol=DEFAULT_TOL):
    return make_channel([U], tol)


def _check_state(ch, rho):
    rho = as_matrix(rho, square=True, name='rho')
    if rho.shape[0] != ch.dim:
        raise DimensionError(f"State is {rho.shape[0]}x{rho.shape[0]} but channel acts on d={ch.dim}",
                             state_dim=rho.shape[0], channel_dim=ch.dim)
    return rho


def apply(ch, rho):
    """Phi(rho) = sum_i V_i rho V_i*."""
    rho = _check_state(ch, rho)
    V = ch.stacked
    return np.einsum('kij,jl,kml->im', V, rho, V.conj())


def kraus_rep(V):
    """[V] = V kron conj(V), the representation of a single Kraus term."""
    V = as_matrix(V, square=True)
    return np.kron(V, V.conj())


def matrix_rep(ch):
    """The d^2 x d^2 representation sum_i V_i kron conj(V_i)."""
    return sum(kraus_rep(V) for V in ch.kraus)


def apply_rep(M, rho):
    """Apply a representation to a state through vec/unvec."""
    rho = as_matrix(rho, square=True)
    return unvec(M @ vec(rho), rho.shape[0])


def _same_dim(chans):
    dims = {ch.dim for ch in chans}
    if len(dims) != 1:
        raise DimensionError("Channels act on different dimensions", dims=sorted(dims))


def compose(a, b):
    """
    a after b: Kraus products A_i B_j, so matrix_rep(compose(a, b)) = [a][b].
    """
    _same_dim([a, b])
    kraus = tuple(A @ B for A in a.kraus for B in b.kraus)
    return KrausChannel(dim=a.dim, kraus=kraus, tp_tol=max(a.tp_tol, b.tp_tol), non_tp=a.non_tp or b.non_tp)


def adjoint(ch):
    """
    Phi*(X) = sum_i V_i* X V_i.

    The adjoint is unital iff ``ch`` is TP and TP iff ``ch`` is unital; its
    representation is the conjugate transpose of matrix_rep(ch).
    """
    kraus = tuple(V.conj().T for V in ch.kraus)
    non_tp = unital_residual(list(ch.kraus)) > ch.tp_tol
    return KrausChannel(dim=ch.dim, kraus=kraus, tp_tol=ch.tp_tol, non_tp=non_tp)


def convex_mix(weights, chans):
    """
    Mixture sum_k w_k Phi_k with Kraus list {sqrt(w_k) V_i^(k)}.

    Raises:
        WeightError: negative weight or weights not summing to 1 within 1e-12
        DimensionError: channels of different dimension
    """
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(chans) or len(chans) == 0:
        raise WeightError("Need one weight per channel", n_weights=len(weights), n_channels=len(chans))
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise WeightError("Weights must be nonnegative and sum to 1", weights=weights.tolist())
    _same_dim(chans)
    kraus = tuple(np.sqrt(w) * V for w, ch in zip(weights, chans) for V in ch.kraus)
    return KrausChannel(
        dim=chans[0].dim,
        kraus=kraus,
        tp_tol=max(ch.tp_tol for ch in chans),
        non_tp=any(ch.non_tp for ch in chans),
    )


def kraus_remix(ch, W, tol=DEFAULT_TOL):
    """
    Another Kraus list of the same channel: V'_j = sum_i W[j, i] V_i.

    Args:
        ch: channel with n Kraus operators
        W: m x n isometry (W* W = I_n)

    Raises:
        ParameterError: W is not an isometry of the right shape
    """
    W = as_matrix(W, name='W')
    n = len(ch)
    if W.shape[1] != n or W.shape[0] < n:
        raise ParameterError("Remixing matrix has the wrong shape", shape=list(W.shape), n_kraus=n)
    residual = max_abs(W.conj().T @ W - np.eye(n))
    if residual > tol:
        raise ParameterError("Remixing matrix is not an isometry", residual=residual)
    kraus = tuple(np.einsum('i,ijk->jk', W[j], ch.stacked) for j in range(W.shape[0]))
    return KrausChannel(dim=ch.dim, kraus=kraus, tp_tol=ch.tp_tol, non_tp=ch.non_tp)


def validate(ch):
    """TP and unitality residuals against the identity, in max-norm."""
    kraus = list(ch.kraus)
    tp = tp_residual(kraus)
    unital = unital_residual(kraus)
    return ChannelReport(
        trace_preserving=tp <= ch.tp_tol,
        unital=unital <= ch.tp_tol,
        tp_residual=tp,
        unital_residual=unital,
    )


def rep_distance(a, b):
    """Max-norm distance between the representations of two channels."""
    _same_dim([a, b])
    return max_abs(matrix_rep(a) - matrix_rep(b))
