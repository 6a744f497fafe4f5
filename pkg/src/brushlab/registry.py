"""Registry of experiments and the thread pool they run on."""

from __future__ import annotations

import asyncio
import inspect
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import wraps
from typing import (
    Any,
    Awaitable,
    Callable,
    Dict,
    Iterable,
    List,
    Tuple,
    TypeVar,
)

from typing_extensions import TypeAlias

from brushlab.config import ExperimentConfig
from brushlab.error import ConfigError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class ExperimentOutput:
    """Table and summary produced by one experiment.

    Attributes:
        header: CSV column names.
        rows: CSV rows, one value per column.
        results: JSON-ready summary values.
    """

    header: Tuple[str, ...]
    rows: List[Tuple[Any, ...]] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)


class TaskPool:
    """Runs independent tasks of an experiment on a fixed number of
    threads. Results come back in submission order."""

    __slots__ = ("threads", "_executor")

    def __init__(self, threads: int = 1):
        if threads < 1:
            raise ConfigError(f"thread count must be positive, got {threads}")
        self.threads = threads
        self._executor = ThreadPoolExecutor(
            max_workers=threads, thread_name_prefix="brushlab"
        )

    def __enter__(self) -> TaskPool:
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        self._executor.shutdown(wait=True)

    async def call(self, func: Callable[..., R], *args: Any) -> R:
        loop = asyncio.get_running_loop()
        return await loop.run_in_executor(self._executor, func, *args)

    async def map(self, func: Callable[[T], R], items: Iterable[T]) -> List[R]:
        return list(await asyncio.gather(*(self.call(func, item) for item in items)))


ExperimentFunction: TypeAlias = Callable[
    [ExperimentConfig, TaskPool], Awaitable[ExperimentOutput]
]
"""An experiment takes the validated configuration and the task pool and
produces its table and summary."""


class Registry:
    """Registry of experiments."""

    __slots__ = ("experiments", "_name")

    def __init__(self, name: str):
        """Initialize an experiment registry.

        Args:
            name: Name of the registry, used in log messages.

        Raises:
            ValueError: If the name is empty.
        """
        if not name:
            raise ValueError("missing registry name")
        self._name = name
        self.experiments: Dict[str, ExperimentFunction] = {}

    @property
    def name(self) -> str:
        return self._name

    def __contains__(self, name: str) -> bool:
        return name in self.experiments

    def names(self) -> List[str]:
        return sorted(self.experiments)

    def experiment(self, name: str) -> Callable[[Callable], ExperimentFunction]:
        """Decorator that registers an experiment under a subcommand name.

        Plain functions run on the task pool; coroutines run on the event
        loop and may submit their own tasks to the pool.
        """

        def register(func: Callable) -> ExperimentFunction:
            if inspect.iscoroutinefunction(func):
                logger.debug("registering coroutine experiment: %s", name)
                wrapped = func
            else:
                logger.debug("registering experiment: %s", name)
                wrapped = self._wrap_function(func)
            if name in self.experiments:
                raise ValueError(f"experiment already registered with name '{name}'")
            self.experiments[name] = wrapped
            return wrapped

        return register

    @staticmethod
    def _wrap_function(
        func: Callable[[ExperimentConfig, TaskPool], ExperimentOutput]
    ) -> ExperimentFunction:
        @wraps(func)
        async def asyncio_wrapper(
            config: ExperimentConfig, pool: TaskPool
        ) -> ExperimentOutput:
            return await pool.call(func, config, pool)

        return asyncio_wrapper

    async def run(
        self, name: str, config: ExperimentConfig, pool: TaskPool
    ) -> ExperimentOutput:
        """Raises:
        ConfigError: If no experiment has that name or the configuration is
            for another experiment.
        """
        if name not in self.experiments:
            raise ConfigError(f"unknown experiment {name!r}")
        config.for_experiment(name)
        logger.info("%s: running %s on %d threads", self._name, name, pool.threads)
        return await self.experiments[name](config, pool)

    def run_sync(self, name: str, config: ExperimentConfig, threads: int = 1) -> ExperimentOutput:
        with TaskPool(threads) as pool:
            return asyncio.run(self.run(name, config, pool))


default_registry = Registry("brushlab")
"""Registry holding the experiments of :mod:`brushlab.experiments`."""
