"""Representations, special functions, geometry, tables and property suites"""

from .tables import TableRequest, generate, write_table
from .verification import VerifyContext, run_verify

__all__ = [
    "TableRequest",
    "generate",
    "write_table",
    "VerifyContext",
    "run_verify",
]
