"""
Sérialisation texte des opérateurs.

Un opérateur est écrit dans deux fichiers voisins :

- ``<nom>.header`` : lignes clé=valeur (format, dim, hermitian_hint,
  normalization, label, params, content_hash) ;
- ``<nom>.matrix`` : dim² lignes ``ligne,colonne,re,im`` dans l'ordre des
  lignes, 17 chiffres significatifs.

L'empreinte SHA-256 du fichier matrice protège son intégrité.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

import numpy as np

from ..core.errors import CorruptionError, DimensionMismatchError
from ..core.fock import FockOperator

logger = logging.getLogger(__name__)

FORMAT_VERSION = "fockregions-operator/1"
HEADER_SUFFIX = ".header"
MATRIX_SUFFIX = ".matrix"


def format_value(value: float) -> str:
    """Décimal à 17 chiffres significatifs, relu bit à bit."""
    return f"{value:.17g}"


def atomic_write_text(path: Path, text: str) -> None:
    """Écrit un fichier via un fichier temporaire du même dossier puis un renommage."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(temp_name, path)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise


def matrix_text(entries: np.ndarray) -> str:
    """Texte du fichier matrice."""
    rows, cols = entries.shape
    lines = [
        f"{i},{j},{format_value(entries[i, j].real)},{format_value(entries[i, j].imag)}"
        for i in range(rows) for j in range(cols)
    ]
    return "\n".join(lines) + "\n"


def content_hash(text: str) -> str:
    """Empreinte SHA-256 hexadécimale d'un texte UTF-8."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _paths(path: Path) -> tuple[Path, Path]:
    path = Path(path)
    return path.with_suffix(HEADER_SUFFIX), path.with_suffix(MATRIX_SUFFIX)


def save_operator(operator: FockOperator, path: Path) -> tuple[Path, Path]:
    """
    Enregistre un opérateur.

    Args:
        operator: Opérateur à écrire
        path: Chemin de base ; les suffixes .header et .matrix sont ajoutés

    Returns:
        (chemin de l'en-tête, chemin de la matrice)
    """
    header_path, matrix_path = _paths(path)
    body = matrix_text(operator.entries)
    header = {
        "format": FORMAT_VERSION,
        "dim": str(operator.dim),
        "hermitian_hint": "true" if operator.hermitian_hint else "false",
        "normalization": str(operator.params.get("normalization", "")),
        "label": operator.label,
        "params": json.dumps(operator.params, sort_keys=True, default=float),
        "content_hash": content_hash(body),
    }
    # matrice d'abord : un en-tête présent désigne toujours une matrice complète
    atomic_write_text(matrix_path, body)
    atomic_write_text(header_path, "".join(f"{k}={v}\n" for k, v in header.items()))
    logger.debug("Opérateur %s écrit dans %s", operator.label, header_path)
    return header_path, matrix_path


def read_header(path: Path) -> dict[str, str]:
    """Lit les paires clé=valeur d'un en-tête."""
    header_path, _ = _paths(path)
    header = {}
    for raw in header_path.read_text(encoding="utf-8").splitlines():
        if not raw.strip():
            continue
        key, sep, value = raw.partition("=")
        if not sep:
            raise CorruptionError(f"Ligne d'en-tête invalide dans {header_path}: {raw!r}")
        header[key] = value
    return header


def load_operator(path: Path) -> FockOperator:
    """
    Relit un opérateur enregistré par save_operator.

    Raises:
        CorruptionError: empreinte différente ou fichier mal formé
        DimensionMismatchError: nombre ou indices de lignes incompatibles avec dim
    """
    header_path, matrix_path = _paths(path)
    header = read_header(path)
    if header.get("format") != FORMAT_VERSION:
        raise CorruptionError(f"Format inconnu dans {header_path}: {header.get('format')}")
    body = matrix_path.read_text(encoding="utf-8")
    if content_hash(body) != header.get("content_hash"):
        raise CorruptionError(f"Empreinte invalide pour {matrix_path}")

    dim = int(header["dim"])
    lines = body.splitlines()
    if len(lines) != dim * dim:
        raise DimensionMismatchError(f"{len(lines)} lignes pour dim={dim} dans {matrix_path}")
    entries = np.zeros((dim, dim), dtype=complex)
    for raw in lines:
        i, j, re_part, im_part = raw.split(",")
        row, col = int(i), int(j)
        if not (0 <= row < dim and 0 <= col < dim):
            raise DimensionMismatchError(f"Indice ({row}, {col}) hors de la dimension {dim}")
        entries[row, col] = complex(float(re_part), float(im_part))

    return FockOperator(entries, hermitian_hint=header.get("hermitian_hint") == "true",
                        label=header.get("label", ""),
                        params=json.loads(header.get("params", "{}")))
