"""
Exception hierarchy shared by every module.

Each SanitizerError carries the exit code the command line returns for it,
the same way an HTTP error carries its status code.
"""


class SanitizerError(Exception):
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ConfigError(SanitizerError):
    exit_code = 2


class SchemaMismatchError(ConfigError):
    pass


class MissingLabelsError(ConfigError):
    pass


class StorageError(SanitizerError):
    exit_code = 3


class UnsupportedVersionError(StorageError):
    pass


class ChecksumError(StorageError):
    pass


class TruncatedBlobError(StorageError):
    pass


class NumericError(SanitizerError):
    exit_code = 4

    def __init__(self, detail: str, last_good=None):
        super().__init__(detail)
        self.last_good = last_good


class MechanismError(SanitizerError):
    exit_code = 5


class UnsupportedMechanismError(MechanismError):
    pass


class UnknownClassError(MechanismError, KeyError):
    def __str__(self):
        return self.detail


# Kernel-level contract violations stay ValueErrors for library callers.

class ShapeError(ValueError):
    pass


class DimensionError(ValueError):
    pass


class ParameterError(ValueError):
    pass


class ContractError(ValueError):
    pass
