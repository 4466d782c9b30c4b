from rest_framework import serializers

from .generators import CurveKind, CurveSpec
from .spaceform import SPACE_FORM_NAMES

MAX_GRID = 8192


def _grid_size(N):
    if N % 2:
        raise serializers.ValidationError("N must be even")
    return N


def _modes(value):
    try:
        return {int(m): float(c) for m, c in value.items()}
    except (TypeError, ValueError):
        raise serializers.ValidationError("mode keys must be integers")


class CurveReportSerializer(serializers.Serializer):
    K = serializers.ChoiceField(choices=sorted(SPACE_FORM_NAMES), default=0)
    N = serializers.IntegerField(min_value=16, max_value=MAX_GRID, default=256)
    stencil_order = serializers.ChoiceField(choices=[2, 4], default=4)
    kind = serializers.ChoiceField(choices=CurveKind.choices, default=CurveKind.CIRCLE)
    r0 = serializers.FloatField(default=1.0)
    cos_modes = serializers.DictField(child=serializers.FloatField(), default=dict)
    sin_modes = serializers.DictField(child=serializers.FloatField(), default=dict)
    a = serializers.FloatField(default=2.0)
    b = serializers.FloatField(default=1.0)
    seed = serializers.IntegerField(min_value=0, max_value=2 ** 64 - 1, default=0)

    def validate_N(self, value):
        return _grid_size(value)

    def validate_cos_modes(self, value):
        return _modes(value)

    def validate_sin_modes(self, value):
        return _modes(value)

    def to_spec(self):
        data = self.validated_data
        return CurveSpec(
            kind=CurveKind(data['kind']),
            r0=data['r0'],
            cos_modes=data['cos_modes'],
            sin_modes=data['sin_modes'],
            a=data['a'],
            b=data['b'],
            seed=data['seed'],
        )


class CounterexampleSerializer(serializers.Serializer):
    r0 = serializers.FloatField(default=0.8)
    eps = serializers.FloatField(min_value=0.0, default=0.05)
    m = serializers.IntegerField(min_value=1, default=2)
    N = serializers.IntegerField(min_value=16, max_value=MAX_GRID, default=2048)
    stencil_order = serializers.ChoiceField(choices=[2, 4], default=4)

    def validate_N(self, value):
        return _grid_size(value)
