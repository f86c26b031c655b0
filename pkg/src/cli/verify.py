"""
Suite de vérification des propriétés numériques.

Chaque contrôle s'exécute à sa propre dimension de référence ; seuls la graine
et le nombre de threads viennent de la configuration.
"""

from __future__ import annotations

import logging
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from ..core.cpti import (
    MapKind,
    apply_kraus_map,
    diagonal_transfer,
    dilated_apply,
    dilation_gram_defect,
    dilation_unitary,
    dual_apply,
    hexagon_map,
    make_map,
    polygon_dilation,
    step_matrix,
    tile_run,
)
from ..core.fock import (
    FockOperator,
    TruncationConfig,
    block_distance,
    hermitian_spectrum,
    nearest_grid_point,
    position_eigenvector,
)
from ..core.geometry import (
    CanonicalPolygon,
    Disk,
    DiskCluster,
    IsoTriangle,
    QuadratureSpec,
    Rectangle,
    Segment,
)
from ..core.region_ops import (
    bundle_operator,
    build_region_operator,
    coherent_symbol,
    disk_operator,
    disk_spectrum_radial,
    displaced_conjugate,
    line_projector,
    parity_averaged_trace,
    rectangle_coherent_symbol,
    segment_operator_closed_form,
)
from ..core.spectra import majorizes, squeezing_check
from ..dsl.parser import format_expression, parse_region_expression
from ..storage.serialization import load_operator, matrix_text, save_operator
from .config import RunConfig

logger = logging.getLogger(__name__)

# Corpus de l'aller-retour analyse / écriture
EXPRESSION_CORPUS = (
    "point",
    "seg(1.5,0.6283185307179586)",
    "line(0,0)",
    "line(1.5707963267948966,-0.5)",
    "rect(0,0,1,1)",
    "rect(-6,-6,12,12)",
    "disk(0,0,2)",
    "disk(0.5,-0.25,1e-1)",
    "tri(0.866,6)",
    "poly(0.8660254037844386,6)",
    "rot(1.0471976,tri(0.866,6))",
    "refl(rect(0,0,0.5,0.5))",
    "disp(0.5,0.3,rect(0,0,1,1))",
    "disp(-1,+2.5E-3,point)",
    "union(rect(0,0,1,1),rect(1,0,1,1))",
    "union(seg(1,0),line(0.3,1))",
    "refl(union(tri(0.866,6), rot(1.0471976, tri(0.866,6)), rot(-1.0471976, tri(0.866,6))))",
    "rot(-0.5,disp(1,1,disk(0,0,1)))",
    "union(point,\n  seg(2,1.2))",
    "union(union(rect(0,0,1,1)),refl(disp(3,0,poly(1,4))))",
)


@dataclass(frozen=True)
class CheckResult:
    """Résultat d'un contrôle nommé."""
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class _Context:
    seed: int
    workers: int

    def spec(self, order: int = 64) -> QuadratureSpec:
        return QuadratureSpec(order=order, workers=self.workers)


def _random_state(rng: np.random.Generator, dim: int) -> FockOperator:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    rho = rho / np.trace(rho).real
    return FockOperator(0.5 * (rho + rho.conj().T), hermitian_hint=True, label="rho")


def _random_observable(rng: np.random.Generator, dim: int) -> FockOperator:
    b = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return FockOperator(0.5 * (b + b.conj().T), hermitian_hint=True, label="X")


def check_whole_plane_identity(ctx: _Context) -> CheckResult:
    cfg = TruncationConfig(24)
    op = build_region_operator(Rectangle(-6.0, -6.0, 12.0, 12.0), cfg, ctx.spec(128))
    error = block_distance(op, np.eye(cfg.dim), cfg)
    return CheckResult("whole_plane_identity", error < 1e-3, f"max|K-1| = {error:.2e}")


def check_segment_closed_form(ctx: _Context) -> CheckResult:
    cfg = TruncationConfig(32)
    worst = 0.0
    for theta in (0.0, np.pi / 5, np.pi / 2):
        closed = segment_operator_closed_form(1.5, theta, cfg).entries
        built = build_region_operator(Segment(1.5, theta), cfg, ctx.spec()).entries
        worst = max(worst, float(np.linalg.norm(built - closed) / np.linalg.norm(closed)))
    return CheckResult("segment_closed_form", worst < 1e-8, f"écart relatif {worst:.2e}")


def check_segment_eigen_relation(ctx: _Context) -> CheckResult:
    cfg = TruncationConfig(64)
    length, theta = 1.5, np.pi / 5
    op = segment_operator_closed_form(length, theta, cfg).entries
    worst = 0.0
    for target in (0.3, 1.0, 2.0):
        q = nearest_grid_point(target, theta, cfg)
        value = np.sin(q * length) / q
        plus, minus = position_eigenvector(q, theta, cfg), position_eigenvector(-q, theta, cfg)
        for sign, psi in ((1.0, plus + minus), (-1.0, plus - minus)):
            residual = np.linalg.norm(op @ psi - sign * value * psi) / np.linalg.norm(psi)
            worst = max(worst, float(residual))
    return CheckResult("segment_eigen_relation", worst < 1e-3, f"résidu {worst:.2e}")


def check_line_projector(ctx: _Context) -> CheckResult:
    cfg = TruncationConfig(64)
    op = line_projector(0.0, 0.0, cfg)
    idempotence = float(np.max(np.abs(op.entries @ op.entries - op.entries)))
    origin = coherent_symbol(op, 0.0, cfg)
    shape = 0.0
    for x in np.linspace(-1.0, 1.0, 5):
        for y in np.linspace(-1.0, 1.0, 5):
            z = complex(x, y)
            ratio = coherent_symbol(op, z, cfg) / origin
            shape = max(shape, abs(ratio - np.exp(-2.0 * x * x)))
    bundle_trace = bundle_operator((-1.0, 0.0, 1.0), 0.0, cfg).trace().real
    passed = idempotence < 1e-9 and shape < 1e-4 and abs(bundle_trace - 3.0) < 1e-6
    return CheckResult("line_projector", passed,
                       f"|K²-K| = {idempotence:.2e}, forme {shape:.2e}, "
                       f"trace faisceau {bundle_trace:.9f}")


def check_rectangle_symbol(ctx: _Context) -> CheckResult:
    cfg = TruncationConfig(48)
    rect = Rectangle(0.0, 0.0, 1.0, 1.0)
    op = build_region_operator(rect, cfg, ctx.spec())
    worst = 0.0
    for x in np.linspace(-1.4, 1.4, 5):
        for y in np.linspace(-1.4, 1.4, 5):
            z = complex(x, y)
            error = abs(coherent_symbol(op, z, cfg) - rectangle_coherent_symbol(z, rect))
            worst = max(worst, error)
    return CheckResult("rectangle_symbol", worst < 1e-4, f"écart {worst:.2e}")


def check_isospectrality(ctx: _Context) -> CheckResult:
    cfg = TruncationConfig(48)
    op = build_region_operator(Rectangle(0.0, 0.0, 1.0, 1.0), cfg, ctx.spec()).compressed(cfg)
    reference = hermitian_spectrum(op).eigenvalues[:cfg.dim // 2]
    worst = 0.0
    for s, t in ((0.5, 0.3), (-1.0, 1.0), (1.0, -0.7)):
        moved = hermitian_spectrum(displaced_conjugate(op, s, t, cfg)).eigenvalues[:cfg.dim // 2]
        worst = max(worst, float(np.max(np.abs(moved - reference))))
    return CheckResult("isospectrality", worst < 1e-6, f"écart spectral {worst:.2e}")


def check_disk_spectrum(ctx: _Context) -> CheckResult:
    cfg = TruncationConfig(48)
    values = disk_spectrum_radial(1.0, cfg)
    e0 = abs(values[0] - (1.0 - np.exp(-1.0)))
    e1 = abs(values[1] - (1.0 - 3.0 * np.exp(-1.0)))
    op = build_region_operator(Disk((0.0, 0.0), 2.0), cfg, ctx.spec()).entries
    off_diagonal = float(np.max(np.abs(op - np.diag(np.diag(op)))))
    passed = e0 < 1e-8 and e1 < 1e-8 and off_diagonal < 1e-10
    return CheckResult("disk_spectrum", passed,
                       f"λ0 {e0:.1e}, λ1 {e1:.1e}, hors diagonale {off_diagonal:.1e}")


def check_hexagon_equivalence(ctx: _Context) -> CheckResult:
    cfg = TruncationConfig(48)
    apothem = np.sqrt(3.0) / 2.0
    triangle = build_region_operator(IsoTriangle(apothem, 6), cfg, ctx.spec())
    mapped = apply_kraus_map(hexagon_map(cfg), triangle)
    direct = build_region_operator(CanonicalPolygon(apothem, 6), cfg, ctx.spec())
    error = block_distance(mapped, direct, cfg, norm="fro")
    return CheckResult("hexagon_equivalence", error < 1e-4, f"Frobenius {error:.2e}")


def _duality_maps(cfg: TruncationConfig):
    yield make_map(MapKind.ROTATION, {"phi": 0.7}, cfg)
    yield make_map(MapKind.REFLECTION, None, cfg)
    yield make_map(MapKind.POLYGON, {"sides": 6}, cfg)
    yield make_map(MapKind.DISPLACEMENT, {"q": 0.4, "p": -0.3}, cfg)
    yield make_map(MapKind.WEST, {"q": 0.5}, cfg)
    yield make_map(MapKind.NORTH, {"p": 0.5}, cfg)
    yield make_map(MapKind.TILE_STEP, {"mu": 0.5, "nu": 0.5}, cfg)
    yield make_map(MapKind.FAN, {"phi": np.pi / 3}, cfg)
    yield make_map(MapKind.BUNDLE, {"offsets": (-1.0, 0.0, 1.0)}, cfg)
    yield hexagon_map(cfg)


def check_duality(ctx: _Context) -> CheckResult:
    cfg = TruncationConfig(24, effective_dim=4)
    rng = np.random.default_rng(ctx.seed)
    worst = 0.0
    for kraus in _duality_maps(cfg):
        for _ in range(20):
            rho, x = _random_state(rng, cfg.dim), _random_observable(rng, cfg.dim)
            forward = np.trace(rho.entries @ apply_kraus_map(kraus, x).entries)
            backward = np.trace(dual_apply(kraus, rho).entries @ x.entries)
            worst = max(worst, abs(forward - backward))
    return CheckResult("duality", worst < 1e-10, f"écart {worst:.2e}")


def check_dilation(ctx: _Context) -> CheckResult:
    cfg = TruncationConfig(24)
    x = build_region_operator(IsoTriangle(np.sqrt(3.0) / 2.0, 6), cfg, ctx.spec())
    worst = 0.0
    for kraus in (make_map(MapKind.REFLECTION, None, cfg), make_map(MapKind.WEST, {"q": 0.5}, cfg)):
        v = dilation_unitary(kraus)
        dilated = dilated_apply(v, x, 2).entries
        worst = max(worst, float(np.max(np.abs(dilated - apply_kraus_map(kraus, x).entries))))
    parity = dilation_unitary(make_map(MapKind.REFLECTION, None, cfg))
    parity_gram = float(np.max(np.abs(parity @ parity.conj().T - 2.0 * np.eye(2 * cfg.dim))))
    polygon = polygon_dilation(6, cfg)
    kraus_sum = apply_kraus_map(make_map(MapKind.POLYGON, {"sides": 6}, cfg), x).entries
    for k in range(6):
        reduced = dilated_apply(polygon, x, 6, k).entries
        worst = max(worst, float(np.max(np.abs(reduced - kraus_sum))))
    polygon_gram = dilation_gram_defect(polygon, 6, 6.0, cfg)
    passed = worst < 1e-12 and parity_gram < 1e-12 and polygon_gram < 1e-12
    return CheckResult("dilation_equivalence", passed,
                       f"Kraus {worst:.1e}, VV†-2 {parity_gram:.1e}, VV†-6 {polygon_gram:.1e}")


def _step_setup(ctx: _Context):
    cfg = TruncationConfig(96, effective_dim=32)
    rect = build_region_operator(Rectangle(0.0, 0.0, 0.5, 0.5), cfg, ctx.spec()).compressed(cfg)
    disk = disk_operator(0.5, cfg).compressed(cfg)
    return cfg, rect, disk


def check_step_sums(ctx: _Context) -> CheckResult:
    cfg, rect, disk = _step_setup(ctx)
    cases = (
        ("sigma", make_map(MapKind.WEST, {"q": 0.5}, cfg), rect),
        ("gamma", make_map(MapKind.TILE_STEP, {"mu": 0.5, "nu": 0.5}, cfg), rect),
        ("epsilon", make_map(MapKind.TILE_STEP, {"mu": 1.0, "nu": 1.0}, cfg), disk),
    )
    details, passed = [], True
    for name, kraus, op in cases:
        after = hermitian_spectrum(apply_kraus_map(kraus, op))
        s = step_matrix(kraus, hermitian_spectrum(op), after, cfg, name)
        ok = (s.row_deviation < 1e-3 and s.col_deviation < 1e-3
              and s.covers(cfg) and bool(np.min(s.entries) >= -1e-12))
        passed = passed and ok
        rows, cols = s.checked_counts
        details.append(f"{name}: {s.row_deviation:.1e}/{s.col_deviation:.1e} "
                       f"sur {rows}/{cols} indices")
    return CheckResult("step_matrix_sums", passed, ", ".join(details))


def check_eigenvalue_update(ctx: _Context) -> CheckResult:
    cfg, rect, disk = _step_setup(ctx)
    worst = 0.0
    for trace in (tile_run(rect, Rectangle(0.0, 0.0, 0.5, 0.5), 1, "rectangle", cfg),
                  tile_run(disk, Disk((0.0, 0.0), 1.0), 1, "disk", cfg)):
        worst = max(worst, trace.steps[-1].step.update_residual)
    return CheckResult("eigenvalue_update", worst < 1e-6, f"max|λ'-Sλ| = {worst:.2e}")


def check_tiling_quadrature(ctx: _Context) -> CheckResult:
    cfg = TruncationConfig(48)
    disk = Disk((0.0, 0.0), 1.0)
    trace = tile_run(build_region_operator(disk, cfg, ctx.spec()), disk, 1, "disk", cfg)
    direct = build_region_operator(DiskCluster(0.0, 1.0, 1), cfg, ctx.spec())
    error = block_distance(trace.final_operator, direct, cfg, norm="fro")
    return CheckResult("tiling_quadrature", error < 1e-4, f"Frobenius {error:.2e}")


def check_diagonal_transfer(ctx: _Context) -> CheckResult:
    cfg = TruncationConfig(48, effective_dim=8)
    diagonal = disk_spectrum_radial(1.0, cfg)
    source = FockOperator(np.diag(diagonal).astype(complex), hermitian_hint=True)
    worst = 0.0
    for kraus in (make_map(MapKind.TILE_STEP, {"mu": 2.0, "nu": 2.0}, cfg),
                  make_map(MapKind.DISPLACEMENT, {"q": 2.0, "p": 2.0}, cfg)):
        direct = np.real(np.diag(apply_kraus_map(kraus, source).entries))
        worst = max(worst, float(np.max(np.abs(diagonal_transfer(kraus, diagonal, cfg) - direct))))
    return CheckResult("diagonal_transfer", worst < 1e-10, f"écart {worst:.2e}")


def check_majorization(ctx: _Context) -> CheckResult:
    rect_cfg = TruncationConfig(64)
    rect_region = Rectangle(0.0, 0.0, 0.5, 0.5)
    rect_op = build_region_operator(rect_region, rect_cfg, ctx.spec())
    disk_cfg = TruncationConfig(48)
    disk_region = Disk((0.0, 0.0), 1.0)
    disk_op = build_region_operator(disk_region, disk_cfg, ctx.spec())
    traces = (tile_run(rect_op, rect_region, 2, "rectangle", rect_cfg, compress=True),
              tile_run(disk_op, disk_region, 1, "disk", disk_cfg, compress=True))
    passed = True
    for trace in traces:
        for previous, current in zip(trace.steps, trace.steps[1:]):
            before = 4.0 * previous.spectrum.eigenvalues
            after = current.spectrum.eigenvalues
            passed = passed and majorizes(before, after, 1e-3)
            passed = passed and majorizes(after, before, 1e-3, order="ascending")
        passed = passed and squeezing_check(trace, 1e-3)
    return CheckResult("majorization", passed, "4λ↓ ≻ λ'↓, λ'↑ ≻ 4λ↑, compression des bornes")


def check_trace_convention(ctx: _Context) -> CheckResult:
    cfg = TruncationConfig(65)
    square = build_region_operator(Rectangle(0.0, 0.0, 1.0, 1.0), cfg, ctx.spec())
    averaged = parity_averaged_trace(square, 64)
    relative = abs(averaged - 1.0 / (2.0 * np.pi)) * 2.0 * np.pi

    small = TruncationConfig(24)
    triangle = build_region_operator(IsoTriangle(np.sqrt(3.0) / 2.0, 6), small, ctx.spec())
    grown = apply_kraus_map(make_map(MapKind.POLYGON, {"sides": 6}, small), triangle)
    ratio = grown.trace().real / triangle.trace().real
    passed = relative < 0.05 and abs(ratio - 6.0) / 6.0 < 1e-6
    return CheckResult("trace_convention", passed,
                       f"trace moyennée {averaged:.5f} (écart {relative:.1%}), rapport {ratio:.9f}")


def check_tooling(ctx: _Context) -> CheckResult:
    round_trip = all(
        parse_region_expression(format_expression(parse_region_expression(text)))
        == parse_region_expression(text)
        for text in EXPRESSION_CORPUS
    )
    cfg = TruncationConfig(24)
    region = Rectangle(0.0, 0.0, 1.0, 1.0)
    single = build_region_operator(region, cfg, QuadratureSpec(order=64, workers=1))
    threaded = build_region_operator(region, cfg, QuadratureSpec(order=64, workers=4))
    identical = matrix_text(single.entries) == matrix_text(threaded.entries)
    with tempfile.TemporaryDirectory() as folder:
        save_operator(single, Path(folder) / "operator")
        loaded = load_operator(Path(folder) / "operator")
    exact = bool(np.array_equal(loaded.entries, single.entries))
    passed = round_trip and identical and exact
    return CheckResult("tooling", passed,
                       f"aller-retour {round_trip}, threads {identical}, sauvegarde {exact}")


CHECKS: tuple[Callable[[_Context], CheckResult], ...] = (
    check_whole_plane_identity,
    check_segment_closed_form,
    check_segment_eigen_relation,
    check_line_projector,
    check_rectangle_symbol,
    check_isospectrality,
    check_disk_spectrum,
    check_hexagon_equivalence,
    check_duality,
    check_dilation,
    check_step_sums,
    check_eigenvalue_update,
    check_tiling_quadrature,
    check_diagonal_transfer,
    check_majorization,
    check_trace_convention,
    check_tooling,
)


def run_verification(cfg: RunConfig) -> list[CheckResult]:
    """Exécute tous les contrôles ; une exception compte comme un échec."""
    ctx = _Context(seed=cfg.seed, workers=cfg.workers)
    results = []
    for check in CHECKS:
        try:
            result = check(ctx)
        except Exception as e:  # pylint: disable=broad-except
            logger.exception("Contrôle %s interrompu", check.__name__)
            result = CheckResult(check.__name__.removeprefix("check_"), False, f"erreur: {e}")
        logger.debug("%s: %s (%s)", result.name, result.passed, result.detail)
        results.append(result)
    return results
