"""Exception types raised across the pipeline."""


class NextCmdError(Exception):
    """Base class for all errors raised by this package."""


class CorpusFormatError(NextCmdError, ValueError):
    """A line of an event log (or a rendered token) could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoCommandEventsError(NextCmdError, ValueError):
    """Target selection was asked to run on a corpus without commands."""


class DivergenceError(NextCmdError, ArithmeticError):
    """Training produced a non-finite loss."""

    def __init__(self, message, epoch=None):
        self.epoch = epoch
        if epoch is not None:
            message = f"{message} (epoch {epoch})"
        super().__init__(message)


class ConfigError(NextCmdError, ValueError):
    """Configuration failed validation."""


class FoldError(NextCmdError):
    """Wraps an exception raised while processing one cross-validation fold."""

    def __init__(self, fold, cause):
        self.fold = fold
        self.cause = cause
        super().__init__(f"fold {fold}: {cause}")
