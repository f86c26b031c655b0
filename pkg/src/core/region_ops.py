"""
Construction des opérateurs de région.

Deux normalisations coexistent :

- ``WIGNER`` pour les régions d'aire non nulle : noyau (1/π)·D(q,p)ΠD†(q,p)
  intégré en dq dp, de sorte que le plan entier donne l'identité ;
- ``LINE`` pour les segments, droites et le point : noyau D·Π·D† sans
  préfacteur, intégré en longueur d'arc.

Une conséquence de la première convention : la trace d'un opérateur de région
vaut aire/(2π), mesurée par la trace moyennée sur les dimensions d et d+1.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np
from scipy import integrate, linalg
from scipy.special import erf, eval_laguerre

from .errors import DimensionMismatchError, NumericalPreconditionError, RegionError
from .fock import (
    MAX_CHUNK_ELEMENTS,
    BasicKind,
    FockOperator,
    TruncationConfig,
    _displacement_block,
    build_basic_operator,
    coherent_vector,
    displacement_operator,
    parity_signs,
    position_eigenvector,
    require_hermitian,
    spectral_function,
)
from .geometry import (
    Displaced,
    Line,
    NodeSet,
    PointOrigin,
    QuadratureSpec,
    Rectangle,
    ReflectedOrigin,
    Region,
    Rotated,
    Segment,
    Union,
    gauss_legendre,
    quadrature_nodes,
    rotation_matrix,
)

logger = logging.getLogger(__name__)


class Normalization(Enum):
    """Normalisation du noyau de parité déplacée."""
    WIGNER = "wigner"
    LINE = "line"


@dataclass(frozen=True)
class KernelConfig:
    """Choix de normalisation du noyau."""
    normalization: Normalization = Normalization.WIGNER

    @staticmethod
    def for_region(region: Region) -> "KernelConfig":
        """Normalisation imposée par la dimension de la région."""
        if region.dimension == 2:
            return KernelConfig(Normalization.WIGNER)
        return KernelConfig(Normalization.LINE)


def _prefactor(normalization: Normalization) -> float:
    return 1.0 / np.pi if normalization is Normalization.WIGNER else 1.0


def _hermitian_part(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


def phase_kernel(q: float, p: float, cfg: TruncationConfig,
                 normalization: Normalization | str = Normalization.WIGNER) -> FockOperator:
    """
    Noyau de parité déplacée Δ(q,p) = D(q,p)ΠD†(q,p).

    L'identité D(q,p)ΠD†(q,p) = D(2q,2p)Π permet d'utiliser directement le
    bloc fermé de D : aucun produit de matrices tronquées n'intervient.

    Args:
        q: Position du point de l'espace des phases
        p: Impulsion du point de l'espace des phases
        cfg: Configuration de troncature
        normalization: WIGNER (préfacteur 1/π) ou LINE (sans préfacteur)

    Returns:
        FockOperator: noyau hermitien
    """
    normalization = Normalization(normalization)
    if not (np.isfinite(q) and np.isfinite(p)):
        raise NumericalPreconditionError(f"Point non fini: ({q}, {p})")
    beta = np.sqrt(2.0) * (q + 1j * p)
    block = _displacement_block(np.array([beta]), cfg.dim)[0] * parity_signs(cfg.dim)[None, :]
    matrix = _hermitian_part(_prefactor(normalization) * block)
    return FockOperator(matrix, hermitian_hint=True, label="phase_kernel",
                        params={"q": float(q), "p": float(p),
                                "normalization": normalization.value})


def _weighted_kernel_sum(nodes: NodeSet, dim: int, workers: int) -> np.ndarray:
    """Σ w·D(2α) sur les nœuds, lot par lot, sommé dans l'ordre des lots."""
    betas = np.sqrt(2.0) * (nodes.points[:, 0] + 1j * nodes.points[:, 1])
    if not np.all(np.isfinite(betas)):
        raise NumericalPreconditionError("Nœud de quadrature non fini")
    weights = nodes.weights
    size = max(1, MAX_CHUNK_ELEMENTS // (dim * dim))
    parts = [slice(start, min(start + size, betas.size)) for start in range(0, betas.size, size)]

    def contribution(part: slice) -> np.ndarray:
        return np.tensordot(weights[part], _displacement_block(betas[part], dim), axes=(0, 0))

    total = np.zeros((dim, dim), dtype=complex)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(contribution, parts))
    else:
        partials = [contribution(part) for part in parts]
    for partial in partials:
        total += partial
    return total


def _two_dimensional_operator(region: Region, cfg: TruncationConfig,
                              spec: QuadratureSpec) -> np.ndarray:
    nodes = quadrature_nodes(region, spec)
    total = _weighted_kernel_sum(nodes, cfg.dim, spec.workers)
    matrix = total * parity_signs(cfg.dim)[None, :] / np.pi
    return _hermitian_part(matrix)


def _build_two_dimensional(region: Region, cfg: TruncationConfig,
                           spec: QuadratureSpec) -> FockOperator:
    order = spec.order
    matrix = _two_dimensional_operator(region, cfg, spec)
    if spec.max_order is not None:
        converged = False
        while 2 * order <= spec.max_order:
            refined = _two_dimensional_operator(region, cfg, spec.with_order(2 * order))
            change = float(np.linalg.norm(refined - matrix))
            matrix, order = refined, 2 * order
            logger.debug("Raffinement ordre %d : écart %.3e", order, change)
            if change < spec.refine_tol:
                converged = True
                break
        if not converged:
            logger.warning("Raffinement arrêté à l'ordre %d sans atteindre %.1e",
                           order, spec.refine_tol)
    params = {
        "normalization": Normalization.WIGNER.value,
        "quad_order": order,
        "area": region.area(),
    }
    return FockOperator(matrix, hermitian_hint=True, label=region.describe(), params=params)


def _check_homogeneous(region: Region) -> None:
    """Refuse les réunions mêlant des membres de dimension 2 et de dimension < 2."""
    if isinstance(region, Union):
        planar = [m.dimension == 2 for m in region.members]
        if any(planar) and not all(planar):
            raise RegionError(f"Réunion de dimensions mélangées: {region.describe()}")
        for member in region.members:
            _check_homogeneous(member)
    elif isinstance(region, (Rotated, ReflectedOrigin, Displaced)):
        _check_homogeneous(region.inner)


def _flatten_one_dimensional(region: Region, angle: float,
                             shift: np.ndarray) -> Iterable[Region]:
    """
    Ramène une région de dimension ≤ 1 à des primitives placées.

    La transformation accumulée est x ↦ R(angle)·x + shift ; la réflexion par
    l'origine est la rotation d'angle π.
    """
    if isinstance(region, Rotated):
        yield from _flatten_one_dimensional(region.inner, angle + region.angle, shift)
    elif isinstance(region, ReflectedOrigin):
        yield from _flatten_one_dimensional(region.inner, angle + np.pi, shift)
    elif isinstance(region, Displaced):
        moved = shift + rotation_matrix(angle) @ np.asarray(region.shift, dtype=float)
        yield from _flatten_one_dimensional(region.inner, angle, moved)
    elif isinstance(region, Union):
        for member in region.members:
            yield from _flatten_one_dimensional(member, angle, shift)
    elif isinstance(region, PointOrigin):
        yield _point_at(shift)
    elif isinstance(region, Segment):
        center = rotation_matrix(angle) @ np.asarray(region.center, dtype=float) + shift
        yield Segment(region.length, region.theta + angle, (float(center[0]), float(center[1])))
    elif isinstance(region, Line):
        theta = region.theta + angle
        normal = np.array([np.cos(theta), np.sin(theta)])
        yield Line(theta, float(region.offset + normal @ shift))
    else:
        raise RegionError(f"Région de dimension 2 dans une construction 1D: {region.describe()}")


def _point_at(shift: np.ndarray) -> Region:
    if np.allclose(shift, 0.0, atol=0.0):
        return PointOrigin()
    return Displaced((float(shift[0]), float(shift[1])), PointOrigin())


def _segment_quadrature(segment: Segment, cfg: TruncationConfig,
                        spec: QuadratureSpec) -> np.ndarray:
    """
    ∫ D(2s·e)Π ds le long du segment centré.

    L'intégrale est évaluée sur la base propre de Q_θ tronqué : chaque valeur
    propre x reçoit le poids ∫ e^{2ixs} ds par Gauss-Legendre, puis la parité
    est appliquée. Le résultat coïncide donc avec sin(Q_θ L)/Q_θ · Π calculé
    sur la même troncature, et non avec la projection de l'opérateur exact.
    """
    q_theta = build_basic_operator(BasicKind.ROTATED_QUADRATURE, cfg, segment.theta)
    values, vectors = linalg.eigh(q_theta.entries)
    half = 0.5 * segment.length
    s, w = gauss_legendre(spec.order, -half, half)
    symbol = np.exp(2j * np.outer(values, s)) @ w
    matrix = (vectors * symbol[None, :]) @ vectors.conj().T
    return matrix * parity_signs(cfg.dim)[None, :]


def _conjugate_by_displacement(matrix: np.ndarray, s: float, t: float,
                               cfg: TruncationConfig) -> np.ndarray:
    d = displacement_operator(s, t, cfg).entries
    return d @ matrix @ d.conj().T


def _one_dimensional_operator(region: Region, cfg: TruncationConfig,
                              spec: QuadratureSpec) -> FockOperator:
    total = np.zeros((cfg.dim, cfg.dim), dtype=complex)
    for piece in _flatten_one_dimensional(region, 0.0, np.zeros(2)):
        if isinstance(piece, PointOrigin):
            total += np.diag(parity_signs(cfg.dim))
        elif isinstance(piece, Displaced):
            s, t = piece.shift
            total += phase_kernel(s, t, cfg, Normalization.LINE).entries
        elif isinstance(piece, Segment):
            part = _segment_quadrature(piece, cfg, spec)
            cq, cp = piece.center
            if cq or cp:
                part = _conjugate_by_displacement(part, cq, cp, cfg)
            total += part
        else:
            total += line_projector(piece.theta, piece.offset, cfg).entries
    params = {
        "normalization": Normalization.LINE.value,
        "quad_order": spec.order,
        "length": region.arc_length(),
    }
    return FockOperator(_hermitian_part(total), hermitian_hint=True,
                        label=region.describe(), params=params)


def build_region_operator(region: Region, cfg: TruncationConfig,
                          spec: QuadratureSpec | None = None) -> FockOperator:
    """
    Opérateur de région K_S = ∫_S W(α) dα dans la base tronquée.

    Args:
        region: Région de l'espace des phases
        cfg: Configuration de troncature
        spec: Paramètres de quadrature (défaut : ordre 64)

    Returns:
        FockOperator: opérateur hermitien

    Raises:
        RegionError: réunion de dimensions mélangées ou non disjointe
    """
    spec = spec or QuadratureSpec()
    _check_homogeneous(region)
    if region.dimension == 2:
        return _build_two_dimensional(region, cfg, spec)
    return _one_dimensional_operator(region, cfg, spec)


def segment_operator_closed_form(length: float, theta: float,
                                 cfg: TruncationConfig) -> FockOperator:
    """
    Forme fermée sin(Q_θ L)/Q_θ · Π du segment centré à l'origine.

    Sur |q_θ⟩ ± |−q_θ⟩ l'opérateur agit avec la valeur propre ± sin(q_θ L)/q_θ.
    """
    if not length > 0:
        raise RegionError(f"Longueur de segment invalide: {length}")
    q_theta = build_basic_operator(BasicKind.ROTATED_QUADRATURE, cfg, theta)
    # sin(xL)/x = L·sinc(xL/π), prolongée par L en 0
    profile = spectral_function(q_theta, lambda x: length * np.sinc(x * length / np.pi))
    matrix = _hermitian_part(profile.entries * parity_signs(cfg.dim)[None, :])
    return FockOperator(matrix, hermitian_hint=True,
                        label=f"seg({length!r},{theta!r})",
                        params={"normalization": Normalization.LINE.value,
                                "length": float(length), "theta": float(theta)})


def line_projector(theta: float, offset: float, cfg: TruncationConfig) -> FockOperator:
    """
    Projecteur |q_θ⟩⟨q_θ| sur la droite Q_θ = offset, normalisé à l'unité.

    La norme tronquée ⟨q|q⟩ est conservée dans ``params["raw_norm"]``.
    """
    rotation = build_basic_operator(BasicKind.ROTATION, cfg, theta).entries
    ket = rotation @ position_eigenvector(offset, 0.0, cfg)
    raw_norm = float(np.vdot(ket, ket).real)
    matrix = _hermitian_part(np.outer(ket, ket.conj()) / raw_norm)
    return FockOperator(matrix, hermitian_hint=True,
                        label=f"line({theta!r},{offset!r})",
                        params={"normalization": Normalization.LINE.value,
                                "theta": float(theta), "offset": float(offset),
                                "raw_norm": raw_norm})


def momentum_projector(offset: float, cfg: TruncationConfig) -> FockOperator:
    """Projecteur sur l'état propre d'impulsion |p⟩ (droite P = offset)."""
    return line_projector(np.pi / 2, offset, cfg)


def bundle_operator(offsets: Iterable[float], theta: float,
                    cfg: TruncationConfig) -> FockOperator:
    """Faisceau de droites parallèles Q_θ = offset_i : somme des projecteurs."""
    offsets = [float(x) for x in offsets]
    if not offsets:
        raise RegionError("Faisceau de droites vide")
    total = sum(line_projector(theta, x, cfg).entries for x in offsets)
    return FockOperator(_hermitian_part(total), hermitian_hint=True,
                        label=f"bundle({len(offsets)})",
                        params={"normalization": Normalization.LINE.value,
                                "theta": float(theta), "offsets": offsets})


def rectangle_coherent_symbol(z: complex, rect: Rectangle) -> float:
    """
    Symbole cohérent ⟨z|K|z⟩ du rectangle sous la normalisation de Wigner.

    (1/4)[erf(x0+A−√2 Re z) − erf(x0−√2 Re z)]·[erf(k0+B−√2 Im z) − erf(k0−√2 Im z)]
    """
    qz = np.sqrt(2.0) * np.real(z)
    pz = np.sqrt(2.0) * np.imag(z)
    along_q = erf(rect.x0 + rect.width - qz) - erf(rect.x0 - qz)
    along_p = erf(rect.k0 + rect.height - pz) - erf(rect.k0 - pz)
    return float(0.25 * along_q * along_p)


def coherent_symbol(operator: FockOperator, z: complex, cfg: TruncationConfig) -> float:
    """⟨z|K|z⟩ avec le vecteur cohérent tronqué."""
    if operator.dim != cfg.dim:
        raise DimensionMismatchError(f"Dimension {operator.dim} au lieu de {cfg.dim}")
    v = coherent_vector(z, cfg)
    return float(np.real(np.vdot(v, operator.entries @ v)))


def disk_spectrum_radial(radius: float, cfg: TruncationConfig) -> np.ndarray:
    """
    Valeurs propres du disque centré : λ_n = (−1)ⁿ ∫₀^{R²} e^{−u} L_n(2u) du.

    Le disque centré est diagonal dans la base de Fock ; l'intégrale radiale
    est évaluée par quadrature adaptative.
    """
    if not radius > 0:
        raise RegionError(f"Rayon invalide: {radius}")
    upper = float(radius) ** 2
    values = np.empty(cfg.dim)
    for n in range(cfg.dim):
        integral, _ = integrate.quad(lambda u, n=n: np.exp(-u) * eval_laguerre(n, 2.0 * u),
                                     0.0, upper, epsabs=1e-13, epsrel=1e-12, limit=200)
        values[n] = (-1.0) ** n * integral
    return values


def disk_operator(radius: float, cfg: TruncationConfig) -> FockOperator:
    """Opérateur diagonal diag(λ_n) du disque centré de rayon ``radius``."""
    values = disk_spectrum_radial(radius, cfg)
    return FockOperator(np.diag(values).astype(complex), hermitian_hint=True,
                        label=f"disk(0.0,0.0,{2.0 * radius!r})",
                        params={"normalization": Normalization.WIGNER.value,
                                "radius": float(radius)})


def displaced_conjugate(operator: FockOperator, s: float, t: float,
                        cfg: TruncationConfig) -> FockOperator:
    """
    Translation rigide D(s,t)·K·D†(s,t) d'un opérateur de région.

    Raises:
        NotHermitianError: si K n'est pas hermitien
    """
    matrix = require_hermitian(operator, cfg.tol)
    if operator.dim != cfg.dim:
        raise DimensionMismatchError(f"Dimension {operator.dim} au lieu de {cfg.dim}")
    moved = _hermitian_part(_conjugate_by_displacement(matrix, s, t, cfg))
    params = dict(operator.params)
    params["shift"] = [float(s), float(t)]
    return FockOperator(moved, hermitian_hint=True,
                        label=f"disp({s!r},{t!r},{operator.label})", params=params)


def parity_averaged_trace(operator: FockOperator, dim: int) -> float:
    """
    Trace moyennée (Tr_d K + Tr_{d+1} K)/2 sur les blocs de tête.

    L'opérateur doit avoir été construit en dimension au moins d+1.
    """
    if operator.dim < dim + 1:
        raise DimensionMismatchError(
            f"Opérateur de dimension {operator.dim}, au moins {dim + 1} requis"
        )
    diagonal = np.real(np.diag(operator.entries))
    return float(0.5 * (diagonal[:dim].sum() + diagonal[:dim + 1].sum()))
