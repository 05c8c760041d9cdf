"""Exception hierarchy shared across the library."""


class TimesenseError(Exception):
    """Base class for all library errors."""


class InvariantViolation(TimesenseError):
    """A domain object failed validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class MissingFile(TimesenseError):
    pass


class MalformedRow(TimesenseError):
    def __init__(self, line, detail=""):
        self.line = line
        super().__init__(f"malformed row at line {line}" + (f": {detail}" if detail else ""))


class NonFiniteSample(TimesenseError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"non-finite sample at index {index}")


class InvalidConfig(TimesenseError):
    pass


class InvalidBand(TimesenseError):
    pass


class TooShort(TimesenseError):
    pass


class EmptySegment(TimesenseError):
    pass


class OutOfRange(TimesenseError):
    pass


class NoBeatsDetected(TimesenseError):
    pass


class TooFewBeats(TimesenseError):
    pass


class DegenerateGeometry(TimesenseError):
    """Poincare sd2 collapsed to zero; the sd1/sd2 ratio is undefined."""


class LengthMismatch(TimesenseError):
    pass


class FeatureExtractionError(TimesenseError):
    """Wraps a channel-level failure with channel and window context."""

    def __init__(self, channel, window, cause):
        self.channel = channel
        self.window = window
        self.cause = cause
        super().__init__(f"{channel}/{window}: {cause}")


class TooFewRows(TimesenseError):
    pass


class DimensionMismatch(TimesenseError):
    pass


class SingleClass(TimesenseError):
    pass


class NonFinite(TimesenseError):
    pass


class ConfigInvalid(TimesenseError):
    pass


class UnsupportedImportance(TimesenseError):
    """The classifier kind exposes no feature-importance measure."""


class UnsupportedClassifier(TimesenseError):
    """RFECV requested for a kind without feature importance."""


class InfeasibleFolds(TimesenseError):
    pass


class TooManyFeatures(TimesenseError):
    pass


class TooFewSamples(TimesenseError):
    pass


class SingleParticipant(TimesenseError):
    pass


class EmptyInput(TimesenseError):
    pass
