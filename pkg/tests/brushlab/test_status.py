import json

from brushlab import error
from brushlab.status import Status, register_error_type, status_for_error


def test_status_for_Exception():
    assert status_for_error(Exception()) is Status.INTERNAL_ERROR


def test_status_for_ValueError():
    assert status_for_error(ValueError()) is Status.PRECONDITION_ERROR


def test_status_for_TypeError():
    assert status_for_error(TypeError()) is Status.PRECONDITION_ERROR


def test_status_for_ArithmeticError():
    assert status_for_error(ZeroDivisionError()) is Status.ACCURACY_ERROR


def test_status_for_JSONDecodeError():
    assert status_for_error(json.JSONDecodeError("x", "{", 0)) is Status.CONFIG_ERROR


def test_status_for_FileNotFoundError():
    assert status_for_error(FileNotFoundError()) is Status.CONFIG_ERROR


def test_status_for_KeyError():
    assert status_for_error(KeyError()) is Status.INTERNAL_ERROR


def test_status_for_brushlab_errors():
    assert status_for_error(error.BrushlabError()) is Status.INTERNAL_ERROR
    assert status_for_error(error.ConfigError()) is Status.CONFIG_ERROR
    assert status_for_error(error.DomainError()) is Status.PRECONDITION_ERROR
    assert status_for_error(error.SizeLimitError()) is Status.PRECONDITION_ERROR
    assert status_for_error(error.ConstructionError()) is Status.PRECONDITION_ERROR
    assert status_for_error(error.AccuracyError()) is Status.ACCURACY_ERROR


def test_exit_codes():
    assert [s.exit_code for s in Status] == [0, 1, 2, 3, 4]
    assert str(Status.CONFIG_ERROR) == "CONFIG_ERROR"


def test_status_for_custom_error_with_handler():
    class CustomError(Exception):
        pass

    def handler(error: Exception) -> Status:
        assert isinstance(error, CustomError)
        return Status.OK

    register_error_type(CustomError, handler)
    assert status_for_error(CustomError()) is Status.OK


def test_status_for_custom_error_with_base_handler():
    class CustomBaseError(Exception):
        pass

    class CustomError(CustomBaseError):
        pass

    def handler(error: Exception) -> Status:
        assert isinstance(error, CustomError)
        return Status.ACCURACY_ERROR

    register_error_type(CustomBaseError, handler)
    assert status_for_error(CustomError()) is Status.ACCURACY_ERROR


def test_status_for_custom_error_with_status():
    class CustomError(Exception):
        pass

    register_error_type(CustomError, Status.CONFIG_ERROR)
    assert status_for_error(CustomError()) is Status.CONFIG_ERROR
