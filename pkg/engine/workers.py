"""Batched evaluation of independent work items on worker threads.

The work items are pure-Python Fraction arithmetic and hold the GIL, so extra
workers add no CPU parallelism. `workers` bounds how many batches are in flight
per wave; results come back in item order whatever the worker count.
"""
import asyncio
import logging
from typing import Callable, Optional, Sequence, TypeVar

from .settings import DEFAULT_SETTINGS, EngineSettings

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


async def _run_batches(fn: Callable[[T], R], items: Sequence[T], batch_size: int, workers: int,
                       progress: Optional[Callable[[int, int], None]]) -> list[R]:
    batches = [items[i:i + batch_size] for i in range(0, len(items), batch_size)]
    results: list[R] = []
    for start in range(0, len(batches), workers):
        wave = batches[start:start + workers]

        def run_batch(batch):
            return [fn(item) for item in batch]

        done = await asyncio.gather(*(asyncio.to_thread(run_batch, b) for b in wave))
        for batch_res in done:
            results.extend(batch_res)
        if progress:
            progress(len(results), len(items))
    return results


def run_batches(fn: Callable[[T], R], items: Sequence[T], settings: EngineSettings = DEFAULT_SETTINGS,
                progress: Optional[Callable[[int, int], None]] = None) -> list[R]:
    """Applies fn to every item, preserving order. With one worker everything runs inline."""
    items = list(items)
    if settings.workers <= 1 or len(items) <= settings.batch_size:
        results = [fn(item) for item in items]
        if progress:
            progress(len(results), len(items))
        return results
    logger.debug("running %d items in batches of %d on %d workers", len(items), settings.batch_size,
                 settings.workers)
    return asyncio.run(_run_batches(fn, items, settings.batch_size, settings.workers, progress))
