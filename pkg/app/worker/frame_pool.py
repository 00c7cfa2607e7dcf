# app/worker/frame_pool.py
from concurrent.futures import Executor, ProcessPoolExecutor
from types import TracebackType
from typing import Callable, Iterable, Optional, TypeVar

from app.core.logging import get_logger

logger = get_logger("frame_pool")

T = TypeVar("T")
R = TypeVar("R")


class FramePool:
    """Ordered map over frame indices, in-process or across worker processes.

    Results always come back in input order, so callers accumulate the same way
    whatever the worker count.
    """

    def __init__(self, workers: int = 1) -> None:
        self.workers = max(1, int(workers))
        self._executor: Optional[Executor] = None

    def __enter__(self) -> "FramePool":
        if self.workers > 1:
            self._executor = ProcessPoolExecutor(max_workers=self.workers)
            logger.debug("worker processes started", workers=self.workers)
        return self

    def __exit__(
        self,
        exc_type: Optional[type[BaseException]],
        exc: Optional[BaseException],
        tb: Optional[TracebackType],
    ) -> None:
        self.close()

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True, cancel_futures=True)
            self._executor = None

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        batch = list(items)
        if self._executor is None:
            return [fn(item) for item in batch]
        chunk = max(1, len(batch) // (4 * self.workers))
        return list(self._executor.map(fn, batch, chunksize=chunk))
