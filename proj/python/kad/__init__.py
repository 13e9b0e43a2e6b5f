"""Python access to the KAD engine."""

from ._kad import (
    Config,
    Engine,
    KadError,
    UnknownSession,
    interpret_answer,
    levenshtein,
    load_bundle,
    load_config,
    name_similarity,
    simulate,
)

__all__ = [
    "Config",
    "Engine",
    "KadError",
    "UnknownSession",
    "interpret_answer",
    "levenshtein",
    "load_bundle",
    "load_config",
    "name_similarity",
    "simulate",
]
