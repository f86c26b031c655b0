"""
Bornes de quasi-probabilité, majorisation et « compression » des bornes
au cours d'un pavage.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .cpti import StepMatrix, TilingTrace
from .errors import ConfigError, DimensionMismatchError
from .fock import MatrixLike, require_hermitian

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OrderedEigenvalues:
    """Réarrangements décroissant et croissant d'un même vecteur réel."""
    descending: np.ndarray
    ascending: np.ndarray
    total: float

    @classmethod
    def from_values(cls, values) -> "OrderedEigenvalues":
        ascending = np.sort(np.asarray(values, dtype=float))
        descending = ascending[::-1].copy()
        ascending.setflags(write=False)
        descending.setflags(write=False)
        return cls(descending=descending, ascending=ascending, total=float(ascending.sum()))


def qpm_bounds(operator: MatrixLike, tol: float = 1e-9) -> tuple[float, float]:
    """
    Plus petite et plus grande valeur propre d'un opérateur de région.

    Elles bornent l'intégrale de la fonction de Wigner de tout état sur la région.

    Raises:
        NotHermitianError: si l'opérateur n'est pas hermitien
    """
    values = linalg.eigvalsh(require_hermitian(operator, tol))
    return float(values[0]), float(values[-1])


def majorizes(p, q, tol: float = 1e-9, order: str = "descending") -> bool:
    """
    Teste p ≻ q à tol près.

    Args:
        p: Vecteur dominant
        q: Vecteur dominé
        tol: Tolérance sur les sommes partielles et les totaux
        order: "descending" (sommes partielles de p↓ ≥ celles de q↓) ou
            "ascending" (sommes partielles de p↑ ≥ celles de q↑)

    Returns:
        bool: True si les totaux coïncident et toutes les sommes partielles dominent

    Raises:
        DimensionMismatchError: longueurs différentes
        ConfigError: ordre ni "descending" ni "ascending"
    """
    first = OrderedEigenvalues.from_values(p)
    second = OrderedEigenvalues.from_values(q)
    if first.ascending.shape != second.ascending.shape:
        raise DimensionMismatchError(
            f"Longueurs différentes: {first.ascending.size} et {second.ascending.size}"
        )
    if order not in ("descending", "ascending"):
        raise ConfigError(f"Ordre inconnu: {order}")
    if abs(first.total - second.total) > tol * max(1.0, abs(first.total)):
        return False
    if order == "descending":
        left, right = first.descending, second.descending
    else:
        left, right = first.ascending, second.ascending
    return bool(np.all(np.cumsum(left) >= np.cumsum(right) - tol))


def squeezing_check(trace: TilingTrace, tol: float = 1e-3) -> bool:
    """
    Vérifie g·λ_min ≤ λ′_min < λ′_max ≤ g·λ_max pour chaque paire de pas consécutifs.

    g est le nombre de générateurs du pas (4 pour le pavage ouest-nord).
    L'inégalité centrale est contrôlée à tol près : un spectre dégénéré est admis.
    """
    if len(trace.steps) < 2:
        logger.warning("Trace de pavage trop courte pour le test de compression")
        return False
    g = trace.growth
    for previous, current in zip(trace.steps, trace.steps[1:]):
        low, high = current.lambda_min, current.lambda_max
        if low < g * previous.lambda_min - tol or high > g * previous.lambda_max + tol:
            return False
        if low > high + tol:
            return False
    return True


def bistochastic_part(step: StepMatrix) -> np.ndarray:
    """H = S / somme attendue."""
    return np.asarray(step.entries) / step.expected_sum


def is_doubly_stochastic(matrix, tol: float = 1e-3, rows=None, cols=None) -> bool:
    """
    Sommes de lignes et de colonnes égales à 1 et coefficients ≥ −1e-12.

    Args:
        matrix: Matrice carrée réelle
        tol: Écart toléré sur les sommes
        rows: Masque des lignes contrôlées (toutes par défaut)
        cols: Masque des colonnes contrôlées (toutes par défaut)
    """
    h = np.asarray(matrix, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatchError(f"Matrice carrée attendue, forme reçue {h.shape}")
    rows = np.ones(h.shape[0], dtype=bool) if rows is None else np.asarray(rows, dtype=bool)
    cols = np.ones(h.shape[1], dtype=bool) if cols is None else np.asarray(cols, dtype=bool)
    if np.any(h < -1e-12):
        return False
    row_ok = np.all(np.abs(h.sum(axis=1)[rows] - 1.0) <= tol)
    col_ok = np.all(np.abs(h.sum(axis=0)[cols] - 1.0) <= tol)
    return bool(row_ok and col_ok)
