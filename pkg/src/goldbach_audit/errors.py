"""Exception hierarchy shared by all modules."""


class GoldbachAuditError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(GoldbachAuditError, ValueError):
    pass


class OutOfRangeError(GoldbachAuditError, ValueError):
    """A query fell outside the coverage of a sieve or SPF table."""


class ResourceLimitError(GoldbachAuditError):
    """A table would exceed the configured memory budget."""


class DomainError(GoldbachAuditError, ValueError):
    pass


class InternalInconsistencyError(GoldbachAuditError, AssertionError):
    """Something that a proven theorem rules out has been observed.

    Always a bug (or hardware fault); never caught inside the package.
    """


class EmptySystemError(GoldbachAuditError):
    """The G-system is empty (h = 0, i.e. 2N <= 6)."""


class AuditNotApplicableError(GoldbachAuditError):
    """No composite of type P exists, so the chain audit has nothing to pair."""


class CheckpointCorruptError(GoldbachAuditError):
    pass


class ResumeRefusedError(GoldbachAuditError):
    """Checkpoint was written for a different scan configuration."""
