"""
Configuration d'exécution.

Les valeurs viennent d'un fichier YAML optionnel puis des options de la ligne
de commande, qui l'emportent.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

import yaml

from ..core.errors import ConfigError, InvalidTruncationError, RegionError
from ..core.fock import TruncationConfig
from ..core.geometry import QuadratureSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """
    Paramètres d'une commande.

    Args:
        dim: Dimension de coupure
        effective_dim: Bloc effectif (0 = dim // 2)
        quad_order: Ordre de quadrature par axe
        max_quad_order: Ordre maximal du raffinement (None = pas de raffinement)
        tol: Tolérance des identités algébriques
        out: Dossier de sortie
        seed: Graine des tirages aléatoires
        expr: Expression de région
        steps: Nombre de pas de pavage
        workers: Threads de quadrature
    """
    dim: int = 32
    effective_dim: int = 0
    quad_order: int = 64
    max_quad_order: int | None = 256
    tol: float = 1e-9
    out: str = "results"
    seed: int = 0
    expr: str = ""
    steps: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.steps < 0:
            raise ConfigError(f"Nombre de pas invalide: {self.steps}")
        if self.seed < 0:
            raise ConfigError(f"Graine invalide: {self.seed}")
        try:
            self.truncation()
            self.quadrature()
        except (InvalidTruncationError, RegionError) as e:
            raise ConfigError(str(e)) from e

    def truncation(self) -> TruncationConfig:
        return TruncationConfig(dim=self.dim, effective_dim=self.effective_dim, tol=self.tol)

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(order=self.quad_order, max_order=self.max_quad_order,
                              workers=self.workers)

    @property
    def out_dir(self) -> Path:
        return Path(self.out)


_FIELD_TYPES = {
    "dim": int, "effective_dim": int, "quad_order": int, "max_quad_order": int,
    "tol": float, "out": str, "seed": int, "expr": str, "steps": int, "workers": int,
}


def load_config_file(path: Path) -> dict[str, Any]:
    """
    Lit un fichier YAML de configuration.

    Raises:
        ConfigError: fichier illisible, YAML invalide ou clé inconnue
    """
    try:
        with open(path, encoding="utf-8") as handle:
            data = yaml.safe_load(handle)
    except OSError as e:
        raise ConfigError(f"Fichier de configuration illisible: {path} ({e})") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"YAML invalide dans {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Le fichier {path} doit contenir un dictionnaire")
    unknown = sorted(set(data) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigError(f"Clés inconnues dans {path}: {', '.join(unknown)}")
    logger.debug("Configuration lue depuis %s: %s", path, sorted(data))
    return data


def build_run_config(file_values: Mapping[str, Any] | None = None,
                     overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """
    Fusionne fichier et options (les options non nulles l'emportent).

    Raises:
        ConfigError: valeur de type invalide ou incohérente
    """
    merged: dict[str, Any] = dict(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    values = {}
    for f in fields(RunConfig):
        if f.name not in merged:
            continue
        raw = merged[f.name]
        if raw is None:
            values[f.name] = None
            continue
        try:
            values[f.name] = _FIELD_TYPES[f.name](raw)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Valeur invalide pour {f.name}: {raw!r}") from e
    return RunConfig(**values)
