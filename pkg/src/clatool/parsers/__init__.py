"""Readers and writers for model, array and outcome files."""

from clatool.parsers.array_file import (
    Outcome,
    OutcomeVector,
    load_array,
    load_outcomes,
    parse_array,
    parse_outcomes,
    serialize_array,
)
from clatool.parsers.model_file import load_model, parse_model, serialize_model

__all__ = [
    "Outcome",
    "OutcomeVector",
    "load_array",
    "load_model",
    "load_outcomes",
    "parse_array",
    "parse_model",
    "parse_outcomes",
    "serialize_array",
    "serialize_model",
]
