import pytest

from brushlab.error import (
    AccuracyError,
    BrushlabError,
    ConfigError,
    ConstructionError,
    DomainError,
    SizeLimitError,
)
from brushlab.status import Status


def test_error_hierarchy():
    assert issubclass(ConfigError, ValueError)
    assert issubclass(DomainError, ValueError)
    assert issubclass(SizeLimitError, DomainError)
    assert issubclass(AccuracyError, ArithmeticError)
    assert not issubclass(ConstructionError, ValueError)


@pytest.mark.parametrize(
    "cls,status",
    [
        (BrushlabError, Status.INTERNAL_ERROR),
        (ConfigError, Status.CONFIG_ERROR),
        (DomainError, Status.PRECONDITION_ERROR),
        (SizeLimitError, Status.PRECONDITION_ERROR),
        (ConstructionError, Status.PRECONDITION_ERROR),
        (AccuracyError, Status.ACCURACY_ERROR),
    ],
)
def test_error_status(cls, status):
    assert cls("boom").status is status


def test_error_message():
    with pytest.raises(DomainError, match="too small"):
        raise DomainError("too small")
