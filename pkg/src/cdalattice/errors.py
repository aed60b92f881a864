"""Exception hierarchy shared by all modules."""


class CdaError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(CdaError):
    """An algebra configuration failed to parse or validate.

    ``diagnostics`` holds one human-readable line per problem; each names the
    offending key path.
    """

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class BudgetExceededError(CdaError):
    """A requested enumeration or codebook would exceed its configured cap."""


class InternalConsistencyError(CdaError):
    """An exact computation produced a value that a valid spec cannot produce."""


class ZeroElementError(CdaError, ValueError):
    """An operation that needs a nonzero element received zero."""


class NotAUnitError(CdaError, ValueError):
    pass


class DegenerateInputError(CdaError, ValueError):
    pass


class SingularMatrixError(CdaError, ValueError):
    pass
