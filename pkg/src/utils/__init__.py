"""Utility modules for fuzzy-psi"""

from .helpers import Timer, format_half, parse_half, parse_rational
from .logger import PerformanceMonitor, PsiLogger
from .workers import WorkerPool

__all__ = ["PsiLogger", "PerformanceMonitor", "WorkerPool", "Timer", "parse_half", "parse_rational", "format_half"]
