"""
Block operator JSON: {"dim": d, "blocks": [{"site": j, "matrix": literal}, ...]}.
"""

import numpy as np
from rest_framework import serializers

from core.serializers import MatrixLiteralSerializer, literal_to_matrix, matrix_literal, run_serializer

from .models import StationaryOperator


class SiteBlockSerializer(serializers.Serializer):
    site = serializers.IntegerField()
    matrix = MatrixLiteralSerializer()


class BlockOperatorSerializer(serializers.Serializer):
    dim = serializers.IntegerField(min_value=1)
    blocks = SiteBlockSerializer(many=True, allow_empty=False)

    def validate(self, attrs):
        d = attrs['dim']
        sites = [entry['site'] for entry in attrs['blocks']]
        if len(set(sites)) != len(sites):
            raise serializers.ValidationError("A site appears more than once.")
        for entry in attrs['blocks']:
            literal = entry['matrix']
            if literal['rows'] != d or literal['cols'] != d:
                raise serializers.ValidationError(
                    f"Block at site {entry['site']} is {literal['rows']}x{literal['cols']}, expected {d}x{d}."
                )
        return attrs

    def to_operator(self):
        data = self.validated_data
        entries = sorted(data['blocks'], key=lambda entry: entry['site'])
        lo, hi = entries[0]['site'], entries[-1]['site']
        blocks = np.zeros((hi - lo + 1, data['dim'], data['dim']), dtype=complex)
        for entry in entries:
            blocks[entry['site'] - lo] = literal_to_matrix(entry['matrix'])
        return StationaryOperator(lo=lo, blocks=blocks)


def parse_operator(data):
    return run_serializer(BlockOperatorSerializer(data=data), 'block operator').to_operator()


def operator_literal(op, tol=0.0):
    """JSON form of a block operator; blocks with max entry <= tol are left out."""
    blocks = np.asarray(op.blocks)
    return {
        'dim': int(blocks.shape[1]),
        'blocks': [
            {'site': op.lo + s, 'matrix': matrix_literal(block)}
            for s, block in enumerate(blocks)
            if np.abs(block).max() > tol
        ],
    }
