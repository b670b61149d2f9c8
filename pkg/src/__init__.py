"""
fuzzy-psi: exact algebra of fields on the fuzzy sphere
"""

__version__ = "1.0.0"
__license__ = "MIT"
