"""Exception and warning types shared across the toolchain."""


class CloneMapError(Exception):
    """Base class for all errors raised by this package."""


class ReportParseError(CloneMapError):
    """A clone report document is malformed (bad JSON/XML, wrong element shape)."""


class ValidationError(CloneMapError):
    """A well-formed input violates a schema or domain invariant."""


class FragmentRangeError(CloneMapError):
    """A fragment's line range does not fit inside its source file."""


class ConfigError(CloneMapError):
    """A configuration value is out of its legal range or infeasible."""


class EmptyDocumentError(CloneMapError):
    """A clone group's token document is empty, so no topic can be fit.

    Carries the offending ``group_ref`` (version id, group index).
    """

    def __init__(self, group_ref):
        self.group_ref = group_ref
        super().__init__(f"empty topic document for group {group_ref}")


class CoverageError(CloneMapError):
    """A mapping refers to a newer group the ground truth does not cover."""


class CloneMapWarning(UserWarning):
    """Data-quality warning (never fatal): unterminated comments, filtered
    groups, overlapping word lists, and similar conditions."""
