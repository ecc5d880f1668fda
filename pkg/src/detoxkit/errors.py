"""Exception hierarchy shared by all detoxkit modules."""


class DetoxkitError(Exception):
    """Base class for every error raised by the toolkit."""


class SchemaError(DetoxkitError, ValueError):
    """Input file columns do not match the declared mode."""


class ParseError(DetoxkitError, ValueError):
    """A field could not be interpreted (e.g. an unknown label string)."""


class IntegrityError(DetoxkitError, ValueError):
    """Dataset-level invariant violated (duplicate ids, empty data, label misalignment)."""


class ConfigurationError(DetoxkitError, ValueError):
    """Invalid configuration; ``errors`` lists every problem found."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class TrainingError(DetoxkitError, ValueError):
    """Training data cannot support the requested model."""


class SolverError(DetoxkitError, RuntimeError):
    """An optimizer diverged."""


class NumericError(DetoxkitError, ValueError):
    """Non-finite values in numeric inputs."""


class UndefinedProximityError(DetoxkitError, ValueError):
    """CEM proximity requested where the class mass is zero."""


class SelectionError(DetoxkitError, ValueError):
    """No usable grid row to select from."""


class ArtifactVersionError(DetoxkitError, ValueError):
    """Model artifact written by an unsupported format version."""
