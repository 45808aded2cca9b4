"""Summative code-assessment engine for Python3 and C++14 submissions."""

__version__ = "0.1.0"
