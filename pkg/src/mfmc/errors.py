"""Exception types shared across the package."""


class MFMCError(Exception):
    """Base class for all package-specific errors."""


class EvaluationError(MFMCError):
    """A model evaluation produced a non-finite value or failed outright.

    Carries the model label/index and the offending sample index so that
    failures in long runs can be traced back to a concrete input row.
    """

    def __init__(self, message, model_index=None, model_label=None, sample_index=None):
        super().__init__(message)
        self.model_index = model_index
        self.model_label = model_label
        self.sample_index = sample_index


class DegenerateStatsError(MFMCError):
    """All output components have zero high-fidelity variance."""


class InfeasibleBudgetError(MFMCError):
    """The budget cannot pay for the minimum number of high-fidelity samples."""


class NotFittedError(MFMCError):
    """A regressor was used before fitting."""


class UnknownNameError(MFMCError):
    """A hierarchy, statistic, or mode name is not registered."""
