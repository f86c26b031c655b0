"""Cache disque des opérateurs de région."""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Callable

from ..core.errors import CorruptionError
from ..core.fock import FockOperator
from .serialization import load_operator, save_operator

logger = logging.getLogger(__name__)


def cache_key(expression: str, dim: int, normalization: str, quad_order: int,
              max_quad_order: int | None) -> str:
    """
    Empreinte SHA-256 des paramètres de construction.

    Expression canonique, dimension, normalisation, ordre de quadrature et
    ordre maximal du raffinement (None sans raffinement).
    """
    ceiling = None if max_quad_order is None else int(max_quad_order)
    payload = json.dumps(
        {"expression": expression, "dim": int(dim), "normalization": normalization,
         "quad_order": int(quad_order), "max_quad_order": ceiling},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class OperatorCache:
    """
    Opérateurs déjà construits, indexés par leur clé de construction.

    Une entrée corrompue est ignorée et reconstruite.
    """

    def __init__(self, root: Path):
        self.root = Path(root)
        self.hits = 0
        self.misses = 0

    def _base(self, key: str) -> Path:
        return self.root / key[:16]

    def get(self, key: str) -> FockOperator | None:
        base = self._base(key)
        if not base.with_suffix(".header").exists():
            return None
        try:
            return load_operator(base)
        except (CorruptionError, OSError, ValueError) as e:
            logger.warning("Entrée de cache ignorée (%s): %s", key[:16], e)
            return None

    def put(self, key: str, operator: FockOperator) -> Path:
        header, _ = save_operator(operator, self._base(key))
        return header

    def get_or_build(self, key: str,
                     builder: Callable[[], FockOperator]) -> tuple[FockOperator, bool]:
        """
        Retourne l'opérateur en cache ou le construit puis l'enregistre.

        Returns:
            (opérateur, True si trouvé en cache)
        """
        cached = self.get(key)
        if cached is not None:
            self.hits += 1
            logger.debug("Cache: succès pour %s", key[:16])
            return cached, True
        self.misses += 1
        logger.debug("Cache: échec pour %s, construction", key[:16])
        operator = builder()
        self.put(key, operator)
        return operator, False
