import enum
import json
from typing import Callable, Dict, Optional, Type, Union


@enum.unique
class Status(int, enum.Enum):
    """Enumeration of the outcome classes of an experiment run.

    The integer value of each member is the process exit code used by the
    command line interface.
    """

    OK = 0
    INTERNAL_ERROR = 1
    CONFIG_ERROR = 2
    PRECONDITION_ERROR = 3
    ACCURACY_ERROR = 4

    def __repr__(self):
        return self.name

    def __str__(self):
        return self.name

    @property
    def exit_code(self) -> int:
        return int(self.value)


Status.OK.__doc__ = "Experiment completed and its artifacts were written"
Status.INTERNAL_ERROR.__doc__ = "Unexpected failure, not attributable to the inputs"
Status.CONFIG_ERROR.__doc__ = "Configuration was missing, malformed or inconsistent"
Status.PRECONDITION_ERROR.__doc__ = (
    "A precondition of a numerical operation was violated by the inputs"
)
Status.ACCURACY_ERROR.__doc__ = (
    "A quadrature failed its halved-step verification at the requested tolerance"
)

_ERROR_TYPES: Dict[Type[BaseException], Union[Status, Callable[[Exception], Status]]] = (
    {}
)


def status_for_error(error: BaseException) -> Status:
    """Returns a Status that corresponds to the specified error."""
    status_or_handler = _find_status_or_handler(error)
    if status_or_handler is not None:
        if isinstance(status_or_handler, Status):
            return status_or_handler
        return status_or_handler(error)  # type: ignore[arg-type]
    # JSONDecodeError is a ValueError, it has to be matched first.
    if isinstance(error, json.JSONDecodeError):
        return Status.CONFIG_ERROR
    elif isinstance(error, (FileNotFoundError, IsADirectoryError)):
        return Status.CONFIG_ERROR
    elif isinstance(error, ArithmeticError):
        return Status.ACCURACY_ERROR
    elif isinstance(error, (TypeError, ValueError)):
        return Status.PRECONDITION_ERROR
    return Status.INTERNAL_ERROR


def register_error_type(
    error_type: Type[BaseException],
    status_or_handler: Union[Status, Callable[[Exception], Status]],
):
    """Register an error type to Status mapping.

    The caller can either register a base exception and a handler, which
    derives a Status from errors of this type. Or, if there's only one
    exception to Status mapping to register, the caller can simply pass
    the exception class and the associated Status.
    """
    _ERROR_TYPES[error_type] = status_or_handler


def _find_status_or_handler(
    error: BaseException,
) -> Optional[Union[Status, Callable[[Exception], Status]]]:
    for cls in type(error).__mro__:
        try:
            return _ERROR_TYPES[cls]
        except KeyError:
            pass

    return None  # not found
