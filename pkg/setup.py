#!/usr/bin/env python3
"""
Setup script for digft

For development installation:
    pip install -e ".[dev]"

For production installation:
    pip install digft
"""

from setuptools import setup

if __name__ == "__main__":
    setup()
