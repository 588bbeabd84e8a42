"""Exception types shared across the package."""


class ModelError(ValueError):
    """Invalid model parameters or an invalid premium query."""


class NumericsError(RuntimeError):
    """A numerical routine failed to reach its tolerance."""


class DeltaMismatchError(NumericsError):
    """The two evaluations of the capital-injection multiplier disagree.

    Carries both values so callers can inspect the gap.
    """

    def __init__(self, message, primary, closed_form):
        super().__init__(message)
        self.primary = primary
        self.closed_form = closed_form
