"""
Walk JSON, in one of two forms:

    {"dim": d, "L": matrix, "R": matrix, "window": [lo, hi]}
    {"dim": d, "window": [lo, hi], "transitions": [{"source": j, "target": i, "matrix": B}, ...]}
"""

from rest_framework import serializers

from core.serializers import MatrixLiteralSerializer, literal_to_matrix, matrix_literal, run_serializer
from core.utils import DEFAULT_TOL

from .utils import from_transitions, make_nn_walk


class TransitionSerializer(serializers.Serializer):
    source = serializers.IntegerField()
    target = serializers.IntegerField()
    matrix = MatrixLiteralSerializer()


class WalkSerializer(serializers.Serializer):
    dim = serializers.IntegerField(min_value=1)
    window = serializers.ListField(child=serializers.IntegerField(), min_length=2, max_length=2)
    L = MatrixLiteralSerializer(required=False)
    R = MatrixLiteralSerializer(required=False)
    transitions = TransitionSerializer(many=True, required=False)

    def validate(self, attrs):
        nn = 'L' in attrs or 'R' in attrs
        explicit = 'transitions' in attrs
        if nn == explicit:
            raise serializers.ValidationError("Give either L and R or a transitions list.")
        if nn and not ('L' in attrs and 'R' in attrs):
            raise serializers.ValidationError("Both L and R are required.")

        d = attrs['dim']
        literals = [attrs[key] for key in ('L', 'R') if key in attrs]
        literals += [t['matrix'] for t in attrs.get('transitions', [])]
        for literal in literals:
            if literal['rows'] != d or literal['cols'] != d:
                raise serializers.ValidationError(
                    f"Transition matrix is {literal['rows']}x{literal['cols']}, expected {d}x{d}."
                )
        return attrs

    def to_walk(self, tol=DEFAULT_TOL, name=''):
        data = self.validated_data
        if 'L' in data:
            return make_nn_walk(literal_to_matrix(data['L']), literal_to_matrix(data['R']), data['window'], tol, name)
        transitions = {(t['source'], t['target']): literal_to_matrix(t['matrix']) for t in data['transitions']}
        return from_transitions(data['dim'], data['window'], transitions, tol, name)


def parse_walk(data, tol=DEFAULT_TOL, name=''):
    return run_serializer(WalkSerializer(data=data), 'walk').to_walk(tol, name)


def walk_literal(walk):
    """JSON form of a walk; nearest-neighbour pairs keep the short form."""
    out = {'dim': walk.dim, 'window': [walk.lo, walk.hi]}
    if walk.pair is not None:
        out['L'] = matrix_literal(walk.pair[0])
        out['R'] = matrix_literal(walk.pair[1])
        return out
    out['transitions'] = [
        {'source': source, 'target': target, 'matrix': matrix_literal(B)}
        for (source, target), B in sorted(walk.transitions().items())
    ]
    return out
