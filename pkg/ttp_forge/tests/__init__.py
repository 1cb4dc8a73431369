"""
Unit tests for ttp-forge package.
"""
