"""Exception types; each maps to a CLI exit status."""


class QpolarError(Exception):
    exit_code = 1


class SceneParseError(QpolarError):
    exit_code = 2


class ValidationError(QpolarError, ValueError):
    exit_code = 3


class DegenerateBeamError(QpolarError, ValueError):
    """No flux in the transverse block along the analyzer axis."""

    exit_code = 4


class InconsistencyError(QpolarError, RuntimeError):
    exit_code = 5
