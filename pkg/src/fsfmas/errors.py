"""Exception hierarchy shared by every fsfmas module."""


class FsfmasError(Exception):
    """Base class for all errors raised by the package."""


class ConfigError(FsfmasError):
    pass


# --- FSF parsing / classification -------------------------------------------

class FsfError(FsfmasError):
    pass


class MalformedTuple(FsfError):
    pass


class UnknownClassPrefix(FsfError):
    pass


class UnknownQualifier(FsfError):
    pass


class BadCoordinate(FsfError):
    pass


class InvalidFsf(FsfError):
    pass


# --- proximity ---------------------------------------------------------------

class NonFiniteInput(FsfmasError, ValueError):
    pass


# --- ATN ---------------------------------------------------------------------

class AtnError(FsfmasError):
    pass


class SchemaError(AtnError, ConfigError):
    pass


class DanglingStateRef(SchemaError):
    pass


class TerminalWithOutgoing(SchemaError):
    pass


class UnknownState(AtnError):
    pass


# --- representation MAS ------------------------------------------------------

class StaleFsf(FsfmasError):
    pass


class MissingQualifier(FsfmasError):
    pass


# --- traces ------------------------------------------------------------------

class ParseError(FsfmasError):
    """A trace line failed to parse; ``lineno`` is 1-based."""

    def __init__(self, path, lineno, reason):
        self.path = str(path)
        self.lineno = lineno
        self.reason = reason
        super().__init__(f"{self.path}:{lineno}: {reason}")


class NonMonotoneTime(ParseError):
    pass
