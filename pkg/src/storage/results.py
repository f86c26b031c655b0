"""Fichiers de résultats : spectres, bornes, traces de pavage et données de tracé."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..core.cpti import TilingTrace
from ..core.geometry import Region
from .serialization import atomic_write_text, format_value


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


def write_spectrum(path: Path, eigenvalues: np.ndarray) -> Path:
    """spectrum.csv : indice et valeur propre, ordre décroissant."""
    rows = [(i, float(v)) for i, v in enumerate(eigenvalues)]
    atomic_write_text(path, _csv_text(("index", "eigenvalue"), rows))
    return Path(path)


def write_bounds(path: Path, lambda_min: float, lambda_max: float) -> Path:
    """bounds.txt : deux lignes clé=valeur."""
    text = f"lambda_min={format_value(lambda_min)}\nlambda_max={format_value(lambda_max)}\n"
    atomic_write_text(path, text)
    return Path(path)


def write_tiling_trace(path: Path, trace: TilingTrace) -> Path:
    """tiling_trace.csv : un enregistrement par pas avec ses diagnostics."""
    header = ("step", "region", "area", "trace", "lambda_min", "lambda_max",
              "row_deviation", "col_deviation", "update_residual")
    rows = []
    for record in trace.steps:
        step = record.step
        diagnostics = ((float(step.row_deviation), float(step.col_deviation),
                        float(step.update_residual)) if step else ("", "", ""))
        rows.append((record.index, record.region.describe(), float(record.area),
                     float(record.trace), record.lambda_min, record.lambda_max, *diagnostics))
    atomic_write_text(path, _csv_text(header, rows))
    return Path(path)


def write_tiling_plot(path: Path, trace: TilingTrace) -> Path:
    """tiling_plot.csv : λ_min, λ_max et enveloppes g^k·λ initiales par pas."""
    first = trace.steps[0]
    rows = []
    for record in trace.steps:
        factor = float(trace.growth ** record.index)
        rows.append((record.index, record.lambda_min, record.lambda_max,
                     factor * first.lambda_min, factor * first.lambda_max))
    header = ("step", "lambda_min", "lambda_max", "envelope_min", "envelope_max")
    atomic_write_text(path, _csv_text(header, rows))
    return Path(path)


def write_outline(path: Path, region: Region, samples: int = 64) -> Path:
    """outline_step<k>.csv : points des contours, numérotés par boucle."""
    rows = [(loop_index, float(q), float(p))
            for loop_index, loop in enumerate(region.outline(samples))
            for q, p in loop]
    atomic_write_text(path, _csv_text(("loop", "q", "p"), rows))
    return Path(path)
