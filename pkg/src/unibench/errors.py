"""Exception hierarchy.

The four category bases map one-to-one onto CLI exit codes, so the driver
can translate any library failure without inspecting messages.
"""


class UnibenchError(Exception):
    # None: the CLI falls back to the exit code of the running subcommand.
    exit_code = None


class MeasurementError(UnibenchError):
    exit_code = 2


class IngestionError(UnibenchError):
    exit_code = 3


class CompositionError(UnibenchError):
    exit_code = 4


class OutputError(UnibenchError):
    exit_code = 5


class NonPositiveMeasurement(UnibenchError, ValueError):
    """A measurement or reference value is zero, negative, NaN or infinite."""

    def __init__(self, value, what="measurement"):
        self.value = value
        self.what = what
        super().__init__(f"{what} must be positive and finite, got {value!r}")


class UnknownReference(CompositionError):
    def __init__(self, reference_id):
        self.reference_id = reference_id
        super().__init__(f"reference subject {reference_id!r} not found")


class MissingReferenceMeasurement(CompositionError):
    def __init__(self, indicator_id):
        self.indicator_id = indicator_id
        super().__init__(f"reference has no measurement for indicator {indicator_id!r}")


class EmptyProfileForSubject(CompositionError):
    def __init__(self, subject_id, profile_id):
        self.subject_id = subject_id
        self.profile_id = profile_id
        super().__init__(f"subject {subject_id!r} has no ratios in profile {profile_id!r}")


class EmptyRecord(CompositionError):
    def __init__(self, subject_id):
        self.subject_id = subject_id
        super().__init__(f"subject {subject_id!r} has no ratios at all")


class DuplicateSubject(CompositionError):
    def __init__(self, subject_id):
        self.subject_id = subject_id
        super().__init__(f"subject {subject_id!r} appears more than once")


class SchemaError(IngestionError):
    """Malformed input document. ``location`` is a row/line number or a JSON path."""

    def __init__(self, message, location=None, source=None):
        self.location = location
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}"
        if location is not None:
            where += f"{':' if where else ''}{location}"
        super().__init__(f"{where}: {message}" if where else message)


class UnitMismatch(IngestionError):
    def __init__(self, indicator_id, got, expected):
        self.indicator_id = indicator_id
        self.got = got
        self.expected = expected
        super().__init__(f"indicator {indicator_id!r} declared in {got!r}, catalog expects {expected!r}")


class ConflictingMeasurement(IngestionError):
    def __init__(self, subject_id, indicator_id, value_a, value_b):
        self.subject_id = subject_id
        self.indicator_id = indicator_id
        self.value_a = value_a
        self.value_b = value_b
        super().__init__(
            f"conflicting values for {subject_id!r}/{indicator_id!r}: {value_a!r} vs {value_b!r}"
        )


class UnknownCipher(MeasurementError, KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown cipher {name!r}")

    def __str__(self):
        return self.args[0]


class BadKeyLength(MeasurementError, ValueError):
    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"key must be {expected} bytes, got {got}")


class BadBlockLength(MeasurementError, ValueError):
    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"block must be {expected} bytes, got {got}")


class ClockError(MeasurementError):
    pass


class MissingRatio(OutputError):
    def __init__(self, subject_id, indicator_id):
        self.subject_id = subject_id
        self.indicator_id = indicator_id
        super().__init__(f"subject {subject_id!r} has no ratio for {indicator_id!r}")


class WorkloadAlignmentError(MeasurementError, ValueError):
    def __init__(self, cipher, workload_bytes, block_bytes):
        self.cipher = cipher
        self.workload_bytes = workload_bytes
        self.block_bytes = block_bytes
        super().__init__(f"{cipher}: workload of {workload_bytes} bytes is not a multiple of the "
                         f"{block_bytes}-byte block")
