from rest_framework import serializers

from backend.apps.ltl.exceptions import FormulaSyntaxError
from backend.apps.ltl.parser import parse
from backend.apps.traces.serializers import StepSerializer

from .generators import SUITES


class BenchCaseSerializer(serializers.Serializer):
    """One line of a bench file."""
    id = serializers.CharField()
    suite = serializers.ChoiceField(choices=SUITES)
    knobs = serializers.DictField()
    constraints = serializers.ListField(child=serializers.CharField(), min_length=1)
    truth = serializers.ListField(child=serializers.BooleanField(), min_length=1)
    trace = StepSerializer(many=True, allow_empty=False)

    def validate_constraints(self, value):
        formulas = []
        for text in value:
            try:
                formulas.append(parse(text))
            except FormulaSyntaxError as exc:
                raise serializers.ValidationError(f"{text!r}: {exc}") from exc
        return formulas

    def validate(self, attrs):
        if len(attrs["truth"]) != len(attrs["constraints"]):
            raise serializers.ValidationError("truth needs one entry per constraint")
        for position, step in enumerate(attrs["trace"], start=1):
            if step["t"] != position:
                raise serializers.ValidationError(f"non-contiguous step index {step['t']} at position {position}")
            if step["labels"] is None:
                raise serializers.ValidationError(f"step {position} has no labels")
        return attrs
