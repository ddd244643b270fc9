"""Thread pool over independent grid points with index-ordered assembly."""

from __future__ import annotations

import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Optional, TypeVar

from src.core.logging import get_logger
from src.core.settings import settings

from .models import ExecutionStatus, GridResult

T = TypeVar("T")
R = TypeVar("R")

batch_logger = get_logger("batch")


class GridEvaluator:
    """Evaluate a worker over grid items on up to ``max_workers`` threads.

    Results come back in item order whatever the completion order, so reports
    assembled from them do not depend on ``max_workers``.
    """

    def __init__(self, max_workers: int = 1) -> None:
        if not 1 <= max_workers <= settings.MAX_JOBS:
            raise ValueError(f"max_workers must lie in [1, {settings.MAX_JOBS}], got {max_workers}")
        self.max_workers = max_workers
        self.progress_callback: Optional[Callable[[str, int, int], None]] = None

    def set_progress_callback(self, callback: Callable[[str, int, int], None]) -> None:
        self.progress_callback = callback

    def _run(self, index: int, item: T, worker: Callable[[T], R]) -> GridResult[T, R]:
        started = time.perf_counter()
        value = worker(item)
        elapsed = round((time.perf_counter() - started) * 1000)
        return GridResult(index, item, ExecutionStatus.SUCCEEDED, value=value, processing_time_ms=elapsed)

    def map_ordered(self, items: Sequence[T], worker: Callable[[T], R]) -> list[GridResult[T, R]]:
        """Apply ``worker`` to every item; exceptions become failed results.

        Futures are collected on the calling thread, so ``progress_callback``
        runs there as well.
        """
        if not items:
            return []
        results: list[GridResult[T, R] | None] = [None] * len(items)
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            futures = {executor.submit(self._run, index, item, worker): index for index, item in enumerate(items)}
            for completed, future in enumerate(as_completed(futures), 1):
                index = futures[future]
                try:
                    result = future.result()
                except Exception as error:
                    batch_logger.info(f"grid item {index} failed: {type(error).__name__}: {error}")
                    result = GridResult(
                        index,
                        items[index],
                        ExecutionStatus.FAILED,
                        error_code=type(error).__name__,
                        error_message=str(error),
                    )
                results[index] = result
                if self.progress_callback:
                    self.progress_callback(f"Evaluated item {index}", completed, len(items))
        failed = sum(1 for result in results if result is not None and not result.succeeded)
        batch_logger.info(f"evaluated {len(items)} grid items on {self.max_workers} workers, {failed} failed")
        return [result for result in results if result is not None]


__all__ = ["GridEvaluator"]
