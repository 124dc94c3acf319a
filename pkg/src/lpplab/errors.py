"""Exception hierarchy shared by the library and the CLI."""


class LppError(Exception):
    exit_code = 3


class ParameterError(LppError, ValueError):
    """Out-of-range parameters or malformed inputs."""
    exit_code = 2


class PreconditionError(LppError):
    exit_code = 2


class SizeError(LppError, MemoryError):
    exit_code = 3


class InvariantError(LppError, AssertionError):
    """An internal consistency check failed; indicates a bug."""
    exit_code = 3


def require(cond, msg, exc=ParameterError):
    if not cond:
        raise exc(msg)
