#!/usr/bin/env python3
"""
fockregions - Opérateurs de régions de l'espace des phases.

Point d'entrée principal de l'application.
"""

import sys
import argparse
import logging
from pathlib import Path

import numpy as np

from . import __version__
from .cli.commands import COMMANDS, EXIT_NUMERICAL, EXIT_USAGE, run_command
from .cli.config import build_run_config, load_config_file
from .core.errors import ConfigError, ExpressionSyntaxError, FockRegionsError, RegionError

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    """Construit l'analyseur d'arguments."""
    parser = argparse.ArgumentParser(
        prog="fockregions",
        description="fockregions - Opérateurs de régions dans une base de Fock tronquée",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exemples:
  fockregions build --expr "rect(0,0,1,1)"            Construire et sauver l'opérateur
  fockregions spectrum --expr "disk(0,0,2)" --dim 48  Écrire spectrum.csv
  fockregions bounds --expr "poly(1,6)"               Bornes λ_min / λ_max
  fockregions tile --expr "rect(0,0,1,1)" --steps 2   Pavage ouest-nord
  fockregions eval --expr "rot(0.5, seg(1,0))"        Résumé d'une expression
  fockregions verify --workers 4                      Lancer les contrôles

Codes de sortie: 0 succès, 1 usage ou configuration, 2 échec numérique,
3 vérification en échec.
        """
    )

    parser.add_argument(
        "command",
        choices=COMMANDS,
        help="Commande à exécuter"
    )

    parser.add_argument(
        "--config",
        type=Path,
        help="Fichier YAML de configuration"
    )

    parser.add_argument(
        "--dim", "-d",
        type=int,
        help="Dimension de coupure de la base de Fock (défaut: 32)"
    )

    parser.add_argument(
        "--effective-dim",
        type=int,
        help="Taille du bloc effectif (défaut: dim // 2)"
    )

    parser.add_argument(
        "--quad-order",
        type=int,
        help="Ordre de quadrature par axe (défaut: 64)"
    )

    parser.add_argument(
        "--max-quad-order",
        type=int,
        help="Ordre maximal du raffinement par doublement (défaut: 256)"
    )

    parser.add_argument(
        "--tol",
        type=float,
        help="Tolérance des identités algébriques (défaut: 1e-9)"
    )

    parser.add_argument(
        "--out", "-o",
        help="Dossier de sortie (défaut: results)"
    )

    parser.add_argument(
        "--expr", "-e",
        help="Expression de région, par ex. \"union(rect(0,0,1,1), disk(3,0,1))\""
    )

    parser.add_argument(
        "--steps",
        type=int,
        help="Nombre de pas de pavage (défaut: 1)"
    )

    parser.add_argument(
        "--seed",
        type=int,
        help="Graine des tirages aléatoires de la vérification (défaut: 0)"
    )

    parser.add_argument(
        "--workers", "-w",
        type=int,
        help="Nombre de threads de quadrature (défaut: 1)"
    )

    parser.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Journalisation détaillée (DEBUG)"
    )

    parser.add_argument(
        "--version",
        action="version",
        version=f"fockregions {__version__}"
    )

    return parser


def main(argv: list[str] | None = None) -> int:
    """Point d'entrée principal."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # --help et --version sortent avec 0, les erreurs d'usage avec 2
        return EXIT_USAGE if e.code else 0

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    overrides = {
        "dim": args.dim,
        "effective_dim": args.effective_dim,
        "quad_order": args.quad_order,
        "max_quad_order": args.max_quad_order,
        "tol": args.tol,
        "out": args.out,
        "expr": args.expr,
        "steps": args.steps,
        "seed": args.seed,
        "workers": args.workers,
    }

    try:
        file_values = load_config_file(args.config) if args.config else {}
        cfg = build_run_config(file_values, overrides)
        return run_command(args.command, cfg)
    except (ConfigError, ExpressionSyntaxError, RegionError) as e:
        print(f"⚠️  Erreur d'usage: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FockRegionsError, np.linalg.LinAlgError, FloatingPointError) as e:
        logger.debug("Échec numérique", exc_info=True)
        print(f"⚠️  Échec numérique: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
