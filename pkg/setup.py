# setup.py
from setuptools import setup

setup()  # All configuration moved to pyproject.toml