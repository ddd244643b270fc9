"""Result records of ordered grid evaluation."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Generic, TypeVar

T = TypeVar("T")
R = TypeVar("R")


class ExecutionStatus(Enum):
    SUCCEEDED = "succeeded"
    FAILED = "failed"


@dataclass(frozen=True)
class GridResult(Generic[T, R]):
    """Outcome of one grid item; failures keep the exception class name."""

    index: int
    item: T
    status: ExecutionStatus
    value: R | None = None
    error_code: str | None = None
    error_message: str | None = None
    processing_time_ms: int = 0

    @property
    def succeeded(self) -> bool:
        return self.status is ExecutionStatus.SUCCEEDED

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "status": self.status.value,
            "error_code": self.error_code,
            "error_message": self.error_message,
        }


__all__ = ["ExecutionStatus", "GridResult"]
