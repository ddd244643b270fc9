"""Ordered parallel evaluation of independent grid points."""

from .models import ExecutionStatus, GridResult
from .process_engine import GridEvaluator

__all__ = ["ExecutionStatus", "GridEvaluator", "GridResult"]
