"""
Serializers for the JSON matrix literal used by every command input:
{"rows": d, "cols": d, "re": [...], "im": [...]} in row-major order.
"""

import json
import logging

import numpy as np
from rest_framework import serializers

from .exceptions import InputParseError

logger = logging.getLogger('core')


class MatrixLiteralSerializer(serializers.Serializer):
    """Row-major complex matrix literal; ``im`` defaults to zeros."""
    rows = serializers.IntegerField(min_value=1)
    cols = serializers.IntegerField(min_value=1)
    re = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    im = serializers.ListField(child=serializers.FloatField(), required=False)

    def validate(self, attrs):
        """Entry lists must match rows x cols."""
        size = attrs['rows'] * attrs['cols']
        if len(attrs['re']) != size:
            raise serializers.ValidationError({"re": f"Expected {size} entries, got {len(attrs['re'])}."})
        if 'im' in attrs and len(attrs['im']) != size:
            raise serializers.ValidationError({"im": f"Expected {size} entries, got {len(attrs['im'])}."})
        return attrs

    def to_matrix(self):
        return literal_to_matrix(self.validated_data)


def literal_to_matrix(attrs):
    """Build the ndarray from validated literal data."""
    re = np.asarray(attrs['re'], dtype=float)
    im = np.asarray(attrs.get('im', np.zeros_like(re)), dtype=float)
    return (re + 1j * im).reshape(attrs['rows'], attrs['cols'])


def run_serializer(serializer, name):
    """
    Validate ``serializer`` or raise :class:`InputParseError` with its errors.
    """
    if not serializer.is_valid():
        logger.warning(f"Rejected {name} input: {serializer.errors}")
        raise InputParseError(f"Invalid {name}", errors=json.loads(json.dumps(serializer.errors)))
    return serializer


def parse_matrix(data, name='matrix'):
    return run_serializer(MatrixLiteralSerializer(data=data), name).to_matrix()


def matrix_literal(A):
    """Inverse of :func:`parse_matrix`; floats are emitted unrounded."""
    A = np.asarray(A, dtype=complex)
    return {
        'rows': int(A.shape[0]),
        'cols': int(A.shape[1]),
        're': [float(x) for x in A.real.reshape(-1)],
        'im': [float(x) for x in A.imag.reshape(-1)],
    }


def load_json(path):
    """
    Read a JSON document from ``path``.

    Raises:
        InputParseError: missing file or malformed JSON
    """
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as e:
        raise InputParseError(f"Cannot read {path}", path=str(path), reason=str(e))
    except json.JSONDecodeError as e:
        raise InputParseError(f"Malformed JSON in {path}", path=str(path), reason=str(e))
