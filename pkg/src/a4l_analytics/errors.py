"""Exception hierarchy shared across the pipeline.

Statistical errors (everything under StatError) are recoverable at the
per-dependent-variable level: the runner records them inside the result
document instead of aborting the run.
"""


class A4LError(Exception):
    """Base class for all pipeline errors."""


class PayloadError(A4LError):
    """A payload failed parsing or structural checks.

    Carries a list of (path, message) diagnostics so callers can report
    every problem at once.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])


class PayloadParseError(PayloadError):
    """Malformed JSON; line/column point at the offending byte."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class DatasetError(A4LError):
    """A dataset file violates the CSV contract (ragged row, duplicate
    header, empty file)."""


class UnknownDatasetError(A4LError):
    """A dataset name is absent from the warehouse. Unreachable after
    payload validation; raised as an internal error otherwise."""


class ManifestError(A4LError):
    """The warehouse manifest is unreadable or corrupt."""


class StatError(A4LError):
    """Base for statistical failures recorded per dependent variable."""

    kind = "stat_error"


class ArgumentError(StatError, ValueError):
    """Domain violation in a statistical function argument."""

    kind = "argument_error"


class InsufficientDataError(StatError):
    """Too few non-missing observations for the requested statistic."""

    kind = "insufficient_data"


class DegenerateDataError(StatError):
    """Data admits no finite test statistic (e.g. zero variance in both
    groups); surfaced explicitly rather than propagating NaN."""

    kind = "degenerate_data"


class GroupSplitError(StatError):
    """The independent/dependent columns cannot form two comparison
    groups (wrong level count, non-numeric dependent)."""

    kind = "group_split"


class NonConvergenceError(StatError):
    """A numeric kernel failed to converge; message names the inputs."""

    kind = "non_convergence"


class LockHeldError(A4LError):
    """Another orchestration cycle holds the lock."""
