from django.core.validators import ProhibitNullCharactersValidator
from rest_framework import serializers

from backend.apps.ltl.exceptions import FormulaSyntaxError
from backend.apps.ltl.formula import PROPOSITION_RE, Verdict
from backend.apps.ltl.parser import parse


class VerbatimTextField(serializers.CharField):
    """Step text kept exactly as written: no trimming, NUL characters allowed."""

    def __init__(self, **kwargs):
        kwargs.setdefault("allow_blank", True)
        kwargs.setdefault("trim_whitespace", False)
        super().__init__(**kwargs)
        self.validators = [
            validator for validator in self.validators if not isinstance(validator, ProhibitNullCharactersValidator)
        ]


def validate_proposition_names(value: list[str]) -> frozenset[str]:
    invalid = [name for name in value if not PROPOSITION_RE.match(name)]
    if invalid:
        raise serializers.ValidationError(f"Invalid proposition names: {', '.join(invalid)}")
    return frozenset(value)


class StepSerializer(serializers.Serializer):
    """One line of a trace file."""
    t = serializers.IntegerField(min_value=1)
    input = VerbatimTextField(required=False, default="")
    output = VerbatimTextField()
    labels = serializers.ListField(child=serializers.CharField(), required=False, allow_null=True, default=None)

    def validate_labels(self, value):
        if value is None:
            return None
        return validate_proposition_names(value)


class MetadataLineSerializer(serializers.Serializer):
    meta = serializers.DictField()


class WitnessEntrySerializer(serializers.Serializer):
    t = serializers.IntegerField(min_value=1)
    input = VerbatimTextField()
    output = VerbatimTextField()
    labels = serializers.ListField(child=serializers.CharField())
    residual = serializers.CharField()

    def validate_labels(self, value):
        return validate_proposition_names(value)

    def validate_residual(self, value):
        try:
            return parse(value)
        except FormulaSyntaxError as exc:
            raise serializers.ValidationError(str(exc)) from exc


class VerdictReportSerializer(serializers.Serializer):
    constraint_id = serializers.CharField()
    verdicts = serializers.ListField(
        child=serializers.ChoiceField(choices=[verdict.value for verdict in Verdict]),
    )
    violations = serializers.IntegerField(min_value=0)
    satisfactions = serializers.IntegerField(min_value=0)
    witnesses = serializers.ListField(child=serializers.ListField(child=WitnessEntrySerializer()))

    def validate(self, attrs):
        counted_violations = attrs["verdicts"].count(Verdict.VIOLATED.value)
        counted_satisfactions = attrs["verdicts"].count(Verdict.SATISFIED.value)
        if (attrs["violations"], attrs["satisfactions"]) != (counted_violations, counted_satisfactions):
            raise serializers.ValidationError("Counters do not match the verdict sequence")
        return attrs


class ReportDocumentSerializer(serializers.Serializer):
    mode = serializers.ChoiceField(choices=["plain", "reset"])
    steps = serializers.IntegerField(min_value=0)
    reports = VerdictReportSerializer(many=True)

    def validate(self, attrs):
        for report in attrs["reports"]:
            if len(report["verdicts"]) != attrs["steps"]:
                raise serializers.ValidationError(
                    f"Report {report['constraint_id']} has {len(report['verdicts'])} verdicts for {attrs['steps']} steps"
                )
        return attrs
