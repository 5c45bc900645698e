"""Exception types shared across the pipeline."""


class PipelineError(Exception):
    """Base class for all geopulse errors."""


# ingest
class MalformedRecord(PipelineError):
    """A dump line could not be parsed into a record."""


class MissingField(MalformedRecord):
    """A required field is absent from an otherwise parseable record."""


# topics
class EmptyCorpus(PipelineError):
    pass


class DegenerateCovariance(PipelineError):
    """All points identical; no principal directions exist."""


class TooFewPoints(PipelineError):
    pass


class NoTopics(PipelineError):
    pass


class TooFewTopics(PipelineError):
    pass


# provider
class ProviderUnavailable(PipelineError):
    """Provider endpoint unreachable or the connection broke mid-stream."""


class ProviderError(PipelineError):
    """Provider answered with an error for the request or one of its items."""


class DimensionMismatch(PipelineError):
    pass


class InvalidScores(PipelineError):
    """Provider sentiment scores violate the non-negative / sum-to-one contract."""


# sentiment / series
class AllZero(PipelineError):
    """Every count in the normalization group is zero."""


class EmptyWindow(PipelineError):
    pass


# causality
class MalformedFile(PipelineError):
    pass


class WindowMismatch(PipelineError):
    """Target series does not cover every day of the analysis window."""


class RankDeficient(PipelineError):
    """Design matrix has collinear columns; the fit is not identifiable."""


class InsufficientData(PipelineError):
    pass


# netgraph
class UnknownToken(PipelineError):
    pass


# cli
class ConfigError(PipelineError):
    pass


class StageInputMissing(PipelineError):
    """A stage was asked to run before the stage it depends on."""
