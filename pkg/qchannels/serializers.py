"""
Serializers for channel JSON: {"dim": d, "kraus": [matrix literal, ...]}.
"""

from rest_framework import serializers

from core.serializers import MatrixLiteralSerializer, literal_to_matrix, matrix_literal, run_serializer
from core.utils import DEFAULT_TOL

from .utils import make_channel


class ChannelSerializer(serializers.Serializer):
    dim = serializers.IntegerField(min_value=1)
    kraus = MatrixLiteralSerializer(many=True, allow_empty=False)

    def validate(self, attrs):
        """Every Kraus literal must be dim x dim."""
        d = attrs['dim']
        for index, literal in enumerate(attrs['kraus']):
            if literal['rows'] != d or literal['cols'] != d:
                raise serializers.ValidationError(
                    {"kraus": f"Kraus operator {index} is {literal['rows']}x{literal['cols']}, expected {d}x{d}."}
                )
        return attrs

    def to_channel(self, tol=DEFAULT_TOL):
        return make_channel([literal_to_matrix(literal) for literal in self.validated_data['kraus']], tol)


def parse_channel(data, tol=DEFAULT_TOL):
    return run_serializer(ChannelSerializer(data=data), 'channel').to_channel(tol)


def channel_literal(ch):
    return {'dim': ch.dim, 'kraus': [matrix_literal(V) for V in ch.kraus]}
