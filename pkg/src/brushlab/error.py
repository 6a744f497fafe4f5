from typing import cast

from brushlab.status import Status, register_error_type


class BrushlabError(Exception):
    """Base class for brushlab exceptions."""

    _status = Status.INTERNAL_ERROR

    @property
    def status(self) -> Status:
        return self._status


class ConfigError(BrushlabError, ValueError):
    """Experiment configuration is malformed, has unknown keys or values of
    the wrong type."""

    _status = Status.CONFIG_ERROR


class DomainError(BrushlabError, ValueError):
    """A precondition of a numerical operation does not hold for the given
    inputs. Operations raise it instead of approximating silently."""

    _status = Status.PRECONDITION_ERROR


class SizeLimitError(DomainError):
    """An exhaustive computation was asked to run on an instance above its
    size cap."""


class ConstructionError(BrushlabError):
    """Intervals or cutoff radii do not satisfy the compatibility conditions
    required to build a bell covering."""

    _status = Status.PRECONDITION_ERROR


class AccuracyError(BrushlabError, ArithmeticError):
    """A quadrature changed by more than the requested tolerance when its
    step was halved."""

    _status = Status.ACCURACY_ERROR


def brushlab_error_status(error: Exception) -> Status:
    return cast(BrushlabError, error)._status


register_error_type(BrushlabError, brushlab_error_status)
