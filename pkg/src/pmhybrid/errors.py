"""Exception types mapped to CLI exit codes (usage 1, data 2, numerical 3)."""


class UsageError(ValueError):
    """Bad command-line arguments or option combinations."""


class DataError(ValueError):
    """Malformed or inconsistent input data (files, configs, axes)."""


class SingularityError(ArithmeticError):
    """A computation was wholly singular and had to abort."""
