"""Persistance : opérateurs, cache et fichiers de résultats."""

from .cache import OperatorCache, cache_key
from .results import (
    write_bounds,
    write_outline,
    write_spectrum,
    write_tiling_plot,
    write_tiling_trace,
)
from .serialization import atomic_write_text, content_hash, load_operator, save_operator

__all__ = [
    "OperatorCache", "cache_key", "write_bounds", "write_outline", "write_spectrum",
    "write_tiling_plot", "write_tiling_trace", "atomic_write_text", "content_hash",
    "load_operator", "save_operator",
]
