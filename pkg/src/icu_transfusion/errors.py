"""Exception hierarchy shared across the package."""


class ValidationError(ValueError):
    """Bad user input: configs, parameter ranges, malformed rows."""


class SchemaError(ValidationError):
    """A table or matrix does not match the expected column/variable schema."""


class ReferentialError(ValidationError):
    """A row references an encounter that does not exist or is inconsistent."""


class CohortError(ValidationError):
    """Cohort-level preconditions violated (e.g. single-class cohort)."""


class FitError(RuntimeError):
    """A model or preprocessor could not be fitted as requested."""


class BundleError(RuntimeError):
    """A model bundle is unreadable, corrupt, or has an unsupported version."""
