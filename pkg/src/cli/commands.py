"""Commandes de la ligne de commande : build, spectrum, bounds, tile, verify, eval."""

from __future__ import annotations

import logging

from ..core.cpti import TilingMode, tile_run
from ..core.errors import ConfigError, RegionError
from ..core.fock import FockOperator, hermitian_spectrum
from ..core.geometry import Disk, DiskCluster, Rectangle, Region
from ..core.region_ops import KernelConfig, build_region_operator
from ..core.spectra import qpm_bounds
from ..dsl.parser import format_expression, parse_region_expression, to_region
from ..storage.cache import OperatorCache, cache_key
from ..storage.results import (
    write_bounds,
    write_outline,
    write_spectrum,
    write_tiling_plot,
    write_tiling_trace,
)
from ..storage.serialization import content_hash, matrix_text, save_operator
from .config import RunConfig
from .verify import run_verification

logger = logging.getLogger(__name__)

COMMANDS = ("build", "spectrum", "bounds", "tile", "verify", "eval")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3


def _region(cfg: RunConfig) -> tuple[str, Region]:
    if not cfg.expr.strip():
        raise ConfigError("Aucune expression de région (--expr ou clé 'expr')")
    canonical = format_expression(parse_region_expression(cfg.expr))
    return canonical, to_region(parse_region_expression(canonical))


def _operator(cfg: RunConfig) -> tuple[Region, FockOperator]:
    """Construit l'opérateur de l'expression, via le cache du dossier de sortie."""
    canonical, region = _region(cfg)
    normalization = KernelConfig.for_region(region).normalization.value
    key = cache_key(canonical, cfg.dim, normalization, cfg.quad_order, cfg.max_quad_order)
    cache = OperatorCache(cfg.out_dir / "cache")
    operator, hit = cache.get_or_build(
        key, lambda: build_region_operator(region, cfg.truncation(), cfg.quadrature())
    )
    logger.info("Opérateur %s (%s)", canonical, "cache" if hit else "construit")
    return region, operator


def _build(cfg: RunConfig) -> int:
    _, operator = _operator(cfg)
    header, matrix = save_operator(operator, cfg.out_dir / "operator")
    print(f"Opérateur écrit: {header} + {matrix.name}")
    print(f"Empreinte: {content_hash(matrix_text(operator.entries))}")
    return EXIT_OK


def _spectrum(cfg: RunConfig) -> int:
    _, operator = _operator(cfg)
    spectrum = hermitian_spectrum(operator, cfg.tol)
    path = write_spectrum(cfg.out_dir / "spectrum.csv", spectrum.eigenvalues)
    top = ", ".join(f"{v:.6g}" for v in spectrum.eigenvalues[:5])
    print(f"Valeurs propres ({spectrum.dim}) écrites dans {path}")
    print(f"Plus grandes: {top}")
    return EXIT_OK


def _bounds(cfg: RunConfig) -> int:
    _, operator = _operator(cfg)
    low, high = qpm_bounds(operator, cfg.tol)
    write_bounds(cfg.out_dir / "bounds.txt", low, high)
    print(f"λ_min = {low:.10g}")
    print(f"λ_max = {high:.10g}")
    return EXIT_OK


def _tile(cfg: RunConfig) -> int:
    region, operator = _operator(cfg)
    if isinstance(region, Rectangle):
        mode = TilingMode.RECTANGLE
    elif isinstance(region, (Disk, DiskCluster)):
        mode = TilingMode.DISK
    else:
        raise RegionError(f"Pavage impossible pour {region.describe()} (rectangle ou disque)")
    trace = tile_run(operator, region, cfg.steps, mode, cfg.truncation())
    write_tiling_trace(cfg.out_dir / "tiling_trace.csv", trace)
    write_tiling_plot(cfg.out_dir / "tiling_plot.csv", trace)
    for record in trace.steps:
        write_outline(cfg.out_dir / f"outline_step{record.index}.csv", record.region)
        print(f"Pas {record.index}: aire {record.area:.6g}, "
              f"λ ∈ [{record.lambda_min:.6g}, {record.lambda_max:.6g}]")
    return EXIT_OK


def _verify(cfg: RunConfig) -> int:
    results = run_verification(cfg)
    for result in results:
        mark = "✓" if result.passed else "✗"
        print(f"{mark} {result.name}: {result.detail}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"\n{len(failed)} contrôle(s) en échec: {', '.join(failed)}")
        return EXIT_VERIFY
    print(f"\n✓ {len(results)} contrôles réussis.")
    return EXIT_OK


def _eval(cfg: RunConfig) -> int:
    region, operator = _operator(cfg)
    low, high = qpm_bounds(operator, cfg.tol)
    print(f"Région: {region.describe()}")
    print(f"Dimension géométrique: {region.dimension}")
    print(f"Aire: {region.area():.10g}")
    print(f"Trace: {operator.trace().real:.10g}")
    print(f"Bornes: [{low:.10g}, {high:.10g}]")
    save_operator(operator, cfg.out_dir / "operator")
    return EXIT_OK


_HANDLERS = {
    "build": _build,
    "spectrum": _spectrum,
    "bounds": _bounds,
    "tile": _tile,
    "verify": _verify,
    "eval": _eval,
}


def run_command(command: str, cfg: RunConfig) -> int:
    """
    Exécute une commande.

    Returns:
        int: code de sortie (0 succès, 3 vérification en échec)

    Raises:
        ConfigError: commande inconnue ou expression absente
    """
    handler = _HANDLERS.get(command)
    if handler is None:
        raise ConfigError(f"Commande inconnue: {command} (attendu: {', '.join(COMMANDS)})")
    logger.debug("Commande %s, dim=%d, sortie %s", command, cfg.dim, cfg.out_dir)
    return handler(cfg)
