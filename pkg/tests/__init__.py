"""
fuzzy-psi test suite
"""
