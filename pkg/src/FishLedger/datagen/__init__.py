"""Deterministic synthetic sensor data."""
from .generator import (
    DEFAULT_RANGES,
    NAME_FORMAT,
    GeneratorConfig,
    generate_frame,
    generate_records,
    generate_to_file,
    read_records,
    record_means,
    write_records,
)

__all__ = [
    "DEFAULT_RANGES",
    "NAME_FORMAT",
    "GeneratorConfig",
    "generate_frame",
    "generate_records",
    "generate_to_file",
    "read_records",
    "record_means",
    "write_records",
]
