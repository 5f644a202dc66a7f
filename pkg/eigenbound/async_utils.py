"""Concurrent evaluation of independent sweep items.

Every item of a sweep (one eigenfunction, one frequency) is measured in the
default thread executor. Log records emitted while an item is being measured
are stamped with its key.
"""

import asyncio
import contextvars
import functools
import logging
from typing import Any, Awaitable, Callable, Dict, Hashable, Protocol, Tuple, TypeVar

K = TypeVar("K", bound=Hashable)
V = TypeVar("V")

CURRENT_ITEM: contextvars.ContextVar = contextvars.ContextVar(
    "eigenbound_item", default="main"
)


class SweepItemMixin(logging.Handler):
    """Add the key of the sweep item being measured to the log record as ``item``."""

    def emit(self, record):
        record.item = CURRENT_ITEM.get()
        super().emit(record)


class SweepItemStreamHandler(SweepItemMixin, logging.StreamHandler):
    pass


class SweepItemFileHandler(SweepItemMixin, logging.FileHandler):
    pass


def run(*args, **kwargs):
    """Run an awaitable to completion."""
    return asyncio.run(*args, **kwargs)


class ItemTask(Protocol):
    def __call__(self, key: K, value: V) -> Awaitable[Tuple[K, Any]]:
        """Measure one sweep item, returning its key with the result."""


async def run_map(
    mapping: Dict[K, V],
    func: ItemTask,
    max_concurrency: int = -1,
) -> Dict[K, Any]:
    """Await ``func`` on every (key, value) pair and collect the results by key.

    At most ``max_concurrency`` items are in flight when it is positive; the
    result keeps the key order of ``mapping``.
    """
    sem = asyncio.Semaphore(max_concurrency) if max_concurrency > 0 else None

    async def measure(key: K, value: V) -> Tuple[K, Any]:
        # Each gathered task owns a copy of the context.
        CURRENT_ITEM.set(str(key))
        if sem is None:
            return await func(key, value)
        async with sem:
            return await func(key, value)

    return dict(await asyncio.gather(*(measure(k, v) for k, v in mapping.items())))


def offload(fn: Callable[[V], Any]) -> ItemTask:
    """Wrap a blocking measurement as an ItemTask run in the default executor."""

    async def task(key: K, value: V) -> Tuple[K, Any]:
        loop = asyncio.get_running_loop()
        call = functools.partial(contextvars.copy_context().run, fn, value)
        return key, await loop.run_in_executor(None, call)

    return task


def map_blocking(
    mapping: Dict[K, V], fn: Callable[[V], Any], max_concurrency: int = -1
) -> Dict[K, Any]:
    """Evaluate ``fn`` on every value of ``mapping`` concurrently and wait for all."""
    if not mapping:
        return {}
    return run(run_map(mapping, offload(fn), max_concurrency=max_concurrency))
