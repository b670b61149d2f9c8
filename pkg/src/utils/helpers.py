"""
Helper utilities for fuzzy-psi: half-integer text, rationals, timing
"""

from datetime import datetime
from fractions import Fraction
from typing import Optional

from src.core.errors import ParseError


def parse_rational(text: str) -> Fraction:
    """Parse '3', '-1/3' or '0.25' exactly"""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"not a rational number: {text!r}") from e


def parse_half(text: str) -> int:
    """
    Parse a half-integer and return it doubled

    Args:
        text: '3/2', '-1/2', '2' or '1.5'

    Returns:
        2 * value as int
    """
    value = parse_rational(text) * 2
    if value.denominator != 1:
        raise ParseError(f"not a half-integer: {text!r}")
    return int(value)


def format_half(doubled: int) -> str:
    """Render a doubled label: 3 -> '3/2', -2 -> '-1'"""
    return str(doubled // 2) if doubled % 2 == 0 else f"{doubled}/2"


class Timer:
    """Context manager timing a block and reporting it through the logger"""

    def __init__(self, name: str = "operation", logger=None):
        self.name = name
        self.logger = logger
        self.start_time: Optional[datetime] = None
        self.end_time: Optional[datetime] = None

    def __enter__(self):
        self.start_time = datetime.now()
        return self

    def __exit__(self, *args):
        self.end_time = datetime.now()
        if self.logger is not None:
            self.logger.log_metric(f"{self.name}_duration", self.elapsed)

    @property
    def elapsed(self) -> float:
        if self.start_time and self.end_time:
            return (self.end_time - self.start_time).total_seconds()
        return 0.0
