"""Experiment configuration.

A configuration is a flat JSON object. Every key is optional except
``anisotropy``; unknown keys and values of the wrong type are rejected with
:class:`~brushlab.error.ConfigError`.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass, fields
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

from brushlab.error import ConfigError

logger = logging.getLogger(__name__)

THREADS_ENVVAR = "BRUSHLAB_THREADS"


@dataclass
class NamedValueFromEnvironment:
    """A setting that is either given explicitly or read from an environment
    variable.

    Values read from the environment are read again after unpickling, so a
    configuration shipped to a worker process picks up that process's
    environment.
    """

    _envvar: str
    _name: str
    _value: str
    _from_envvar: bool

    def __init__(
        self,
        envvar: str,
        name: str,
        value: Optional[str] = None,
        from_envvar: bool = False,
    ):
        self._envvar = envvar
        self._name = name
        self._from_envvar = from_envvar
        if value is None:
            self._value = os.environ.get(envvar) or ""
            self._from_envvar = True
        else:
            self._value = value

    def __str__(self):
        return self.value

    def __getstate__(self):
        return (self._envvar, self._name, self._value, self._from_envvar)

    def __setstate__(self, state):
        (self._envvar, self._name, self._value, self._from_envvar) = state
        if self._from_envvar:
            self._value = os.environ.get(self._envvar) or ""

    @property
    def name(self) -> str:
        """Where the value came from: the environment variable or the
        setting's own name."""
        return self._envvar if self._from_envvar else self._name

    @property
    def value(self) -> str:
        return self._value

    @value.setter
    def value(self, value: str):
        self._value = value
        self._from_envvar = False

    @property
    def is_set(self) -> bool:
        return bool(self._value)

    def as_int(self, minimum: int = 1) -> int:
        """Raises:
        ConfigError: If the value is not an integer >= minimum.
        """
        try:
            number = int(self._value)
        except ValueError:
            raise ConfigError(f"{self.name} must be an integer, got {self._value!r}")
        if number < minimum:
            raise ConfigError(f"{self.name} must be >= {minimum}, got {number}")
        return number


def resolve_threads(configured: int, flag: Optional[int] = None) -> NamedValueFromEnvironment:
    """Thread count: the command-line flag, then BRUSHLAB_THREADS, then the
    configuration."""
    if flag is not None:
        return NamedValueFromEnvironment(THREADS_ENVVAR, "--threads", str(flag))
    from_env = NamedValueFromEnvironment(THREADS_ENVVAR, "threads")
    if from_env.is_set:
        return from_env
    return NamedValueFromEnvironment(THREADS_ENVVAR, "threads", str(configured))


def _integer(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return value


def _real(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite, got {value!r}")
    return float(value)


def _exponent(key: str, value: Any) -> float:
    if value == "inf":
        return math.inf
    number = _real(key, value)
    if number <= 0:
        raise ConfigError(f"{key} must be positive or \"inf\", got {value!r}")
    return number


def _text(key: str, value: Any) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{key} must be a string, got {value!r}")
    return value


def _flag(key: str, value: Any) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{key} must be true or false, got {value!r}")
    return value


def _list_of(parse: Callable[[str, Any], Any]) -> Callable[[str, Any], tuple]:
    def parse_list(key: str, value: Any) -> tuple:
        if not isinstance(value, list):
            raise ConfigError(f"{key} must be a list, got {value!r}")
        return tuple(parse(f"{key}[{i}]", v) for i, v in enumerate(value))

    return parse_list


_PARSERS: Dict[str, Callable[[str, Any], Any]] = {
    "experiment": _text,
    "d": _integer,
    "anisotropy": _list_of(_real),
    "p": _list_of(_exponent),
    "q": _exponent,
    "s": _real,
    "beta": _real,
    "tau": _list_of(_exponent),
    "r": _exponent,
    "j_min": _integer,
    "j_max": _integer,
    "n_max": _integer,
    "j0": _integer,
    "levels": _integer,
    "grid_resolution": _integer,
    "N_list": _list_of(_integer),
    "m_list": _list_of(_integer),
    "seed": _integer,
    "threads": _integer,
    "tolerance": _real,
    "trials": _integer,
    "epsilon": _real,
    "axis_n": _integer,
    "axis_m": _integer,
    "axis": _integer,
    "coefficients": _text,
    "norm_kind": _text,
    "size": _integer,
    "relation": _text,
    "oracle": _flag,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment configuration.

    Axes (axis_n, axis_m, axis) are 1-based, as in the file; the numerical
    modules take 0-based axes, see :meth:`axis_index`.
    """

    anisotropy: Tuple[float, ...]
    experiment: Optional[str] = None
    d: Optional[int] = None
    p: Optional[Tuple[float, ...]] = None
    q: float = 2.0
    s: float = 0.0
    beta: float = 0.0
    tau: Optional[Tuple[float, ...]] = None
    r: float = 2.0
    j_min: int = -1
    j_max: int = 1
    n_max: int = 4
    j0: int = 0
    levels: int = 2
    grid_resolution: int = 40
    N_list: Tuple[int, ...] = (16, 32, 64, 128, 256, 512, 1024)
    m_list: Tuple[int, ...] = (0, 1, 2, 4, 8)
    seed: int = 0
    threads: int = 1
    tolerance: float = 1e-8
    trials: int = 5
    epsilon: float = 0.1
    axis_n: Optional[int] = None
    axis_m: Optional[int] = None
    axis: Optional[int] = None
    coefficients: Optional[str] = None
    norm_kind: str = "f"
    size: int = 12
    relation: str = "identity"
    oracle: bool = False

    def __post_init__(self):
        d = len(self.anisotropy)
        if d == 0:
            raise ConfigError("anisotropy must have at least one entry")
        if any(a < 1 for a in self.anisotropy):
            raise ConfigError(f"anisotropy entries must be >= 1, got {self.anisotropy}")
        if self.d is None:
            object.__setattr__(self, "d", d)
        elif self.d != d:
            raise ConfigError(f"d = {self.d} but anisotropy has {d} entries")
        for key in ("p", "tau"):
            value = getattr(self, key)
            if value is not None and len(value) != d:
                raise ConfigError(f"{key} must have {d} entries, got {len(value)}")
        if self.j_min > self.j_max:
            raise ConfigError(f"j_min = {self.j_min} exceeds j_max = {self.j_max}")
        for key in ("n_max", "grid_resolution", "threads", "trials", "size", "levels"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be positive")
        if self.tolerance <= 0:
            raise ConfigError("tolerance must be positive")
        if not 0 < self.epsilon < 1:
            raise ConfigError("epsilon must be in (0, 1)")
        for key in ("axis_n", "axis_m", "axis"):
            value = getattr(self, key)
            if value is not None and not 1 <= value <= d:
                raise ConfigError(f"{key} must be in 1..{d}, got {value}")
        if self.norm_kind not in ("f", "b"):
            raise ConfigError(f"norm_kind must be \"f\" or \"b\", got {self.norm_kind!r}")
        if self.relation not in ("identity", "lower", "upper"):
            raise ConfigError(f"unknown embedding relation {self.relation!r}")
        if any(m < 0 for m in self.m_list):
            raise ConfigError("m_list entries must be nonnegative")
        if any(n < 1 for n in self.N_list):
            raise ConfigError("N_list entries must be positive")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ExperimentConfig:
        """Raises:
        ConfigError: On unknown keys, wrong types or invalid values.
        """
        if not isinstance(data, Mapping):
            raise ConfigError("configuration must be a JSON object")
        unknown = sorted(set(data) - set(_PARSERS))
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        if "anisotropy" not in data:
            raise ConfigError("missing required key: anisotropy")
        values = {key: _PARSERS[key](key, value) for key, value in data.items()}
        return cls(**values)

    @classmethod
    def from_file(cls, path: str) -> ExperimentConfig:
        """Raises:
        ConfigError: If the file cannot be read or parsed.
        """
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read configuration {path}: {e}") from e
        logger.debug("loaded configuration %s", path)
        return cls.from_dict(data)

    def for_experiment(self, name: str) -> ExperimentConfig:
        """Checks that the configuration names no other experiment."""
        if self.experiment is not None and self.experiment != name:
            raise ConfigError(
                f"configuration is for experiment {self.experiment!r}, not {name!r}"
            )
        return self

    def require(self, *keys: str) -> None:
        missing = [key for key in keys if getattr(self, key) is None]
        if missing:
            raise ConfigError(f"missing required keys: {', '.join(missing)}")

    @staticmethod
    def axis_index(axis: int) -> int:
        return axis - 1

    def echo(self) -> Dict[str, Any]:
        """JSON-ready view of every setting, infinities written as "inf"."""

        def plain(value: Any) -> Any:
            if isinstance(value, tuple):
                return [plain(v) for v in value]
            if isinstance(value, float) and math.isinf(value):
                return "inf"
            return value

        return {f.name: plain(getattr(self, f.name)) for f in fields(self)}
