"""
Command input sources.

Channels and walks come either from a JSON file or from a gallery entry
written ``gallery:<name>`` with ``key=value`` parameters. Densities come from
a JSON matrix literal or from a test-family label such as ``basis_0`` or
``maximally_mixed``.
"""

import logging

import numpy as np

from qchannels.serializers import parse_channel
from core.exceptions import InputParseError, ParameterError
from core.serializers import load_json, parse_matrix
from core.utils import DEFAULT_TOL, state_family
from oqrw.gallery import walk_gallery
from oqrw.serializers import parse_walk
from pq.gallery import gallery
from stationary.serializers import parse_operator
from stationary.utils import barrier_walk

logger = logging.getLogger('cli')

GALLERY_PREFIX = 'gallery:'


def parse_params(tokens):
    """
    ``['p=0.4', 'd=3']`` -> ``{'p': 0.4, 'd': 3}``.

    Raises:
        InputParseError: a token without '=' or with a non-numeric value
    """
    params = {}
    for token in tokens or []:
        key, sep, raw = token.partition('=')
        if not sep or not key:
            raise InputParseError(f"Parameter '{token}' is not of the form key=value", token=token)
        try:
            value = int(raw)
        except ValueError:
            try:
                value = float(raw)
            except ValueError:
                raise InputParseError(f"Parameter {key} has a non-numeric value '{raw}'", key=key, value=raw)
        params[key.strip()] = value
    return params


def gallery_name(source):
    """Name after the gallery prefix, or None for a file path."""
    if source and source.startswith(GALLERY_PREFIX):
        return source[len(GALLERY_PREFIX):]
    return None


def load_channel(source, params=None, tol=DEFAULT_TOL):
    name = gallery_name(source)
    if name is not None:
        return gallery(name, params)
    return parse_channel(load_json(source), tol)


def load_walk(source, params=None, window=None, tol=DEFAULT_TOL):
    """
    ``gallery:<walk>`` on ``window``, ``gallery:barrier`` with p11, p22 on
    [0, window[1]], or a walk JSON file whose own window is used.
    """
    name = gallery_name(source)
    if name is None:
        return parse_walk(load_json(source), tol, name=str(source))
    if window is None:
        raise ParameterError("Gallery walks need a window", source=source)
    params = dict(params or {})
    if name == 'barrier':
        try:
            return barrier_walk(params.pop('p11'), params.pop('p22'), window[1], tol)
        except KeyError as e:
            raise ParameterError(f"Missing barrier parameter {e.args[0]}", accepted=['p11', 'p22'])
    return walk_gallery(name, params, window)


def load_density(source, dim):
    """
    Matrix from a literal file or a test-family label; None gives I/d.
    Validation is left to the library call that uses it.
    """
    if source is None:
        return np.eye(dim, dtype=complex) / dim
    labels = dict(state_family(dim, n_random=0))
    if source in labels:
        return labels[source]
    return parse_matrix(load_json(source), name=str(source))


def load_operator(source):
    return parse_operator(load_json(source))
