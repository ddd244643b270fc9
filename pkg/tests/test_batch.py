from __future__ import annotations

import threading
import time
import unittest

from src.batch import ExecutionStatus, GridEvaluator


def _slow_square(value: int) -> int:
    # later items finish first so completion order differs from item order
    time.sleep(0.002 * (5 - value))
    return value * value


class GridEvaluatorTests(unittest.TestCase):
    def test_worker_count_is_bounded(self) -> None:
        for workers in (0, 33):
            with self.subTest(workers=workers):
                with self.assertRaises(ValueError):
                    GridEvaluator(workers)

    def test_results_keep_item_order(self) -> None:
        items = [0, 1, 2, 3, 4]
        results = GridEvaluator(4).map_ordered(items, _slow_square)
        self.assertEqual([result.index for result in results], items)
        self.assertEqual([result.value for result in results], [0, 1, 4, 9, 16])
        self.assertTrue(all(result.succeeded for result in results))

    def test_serial_and_parallel_values_agree(self) -> None:
        items = list(range(12))
        serial = GridEvaluator(1).map_ordered(items, lambda value: value / 3.0)
        parallel = GridEvaluator(6).map_ordered(items, lambda value: value / 3.0)
        self.assertEqual([result.value for result in serial], [result.value for result in parallel])

    def test_exceptions_become_failed_results(self) -> None:
        def worker(value: int) -> float:
            if value == 2:
                raise ValueError("singular point")
            return 1.0 / (value + 1)

        results = GridEvaluator(2).map_ordered([0, 1, 2, 3], worker)
        failed = results[2]
        self.assertEqual(failed.status, ExecutionStatus.FAILED)
        self.assertEqual(failed.error_code, "ValueError")
        self.assertEqual(failed.error_message, "singular point")
        self.assertIsNone(failed.value)
        self.assertEqual(failed.to_dict()["status"], "failed")
        self.assertEqual([result.succeeded for result in results], [True, True, False, True])

    def test_progress_callback_sees_every_item(self) -> None:
        calls: list[tuple[int, int]] = []
        threads: set[int] = set()

        def progress(message: str, completed: int, total: int) -> None:
            calls.append((completed, total))
            threads.add(threading.get_ident())

        evaluator = GridEvaluator(3)
        evaluator.set_progress_callback(progress)
        evaluator.map_ordered(list(range(7)), lambda value: value)
        self.assertEqual(sorted(completed for completed, _ in calls), list(range(1, 8)))
        self.assertTrue(all(total == 7 for _, total in calls))
        self.assertEqual(threads, {threading.get_ident()})

    def test_empty_input(self) -> None:
        self.assertEqual(GridEvaluator(2).map_ordered([], lambda value: value), [])


if __name__ == "__main__":
    unittest.main()
