"""
digft test suite.
"""
