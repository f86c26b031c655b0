"""
Applications complètement positives croissantes en trace (CPTI).

Une application ε(X) = Σ G X G† est donnée par ses générateurs G, unitaires
sur le bloc effectif. Ce module fournit les familles de générateurs (rotation,
parité, polygone, déplacements, pas de pavage), les duales, les dilatations
par blocs unitaires, le pavage ouest-nord et les matrices de pas.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Mapping

import numpy as np

from .errors import (
    DimensionMismatchError,
    MapParameterError,
    NotHermitianError,
    NumericalPreconditionError,
    RegionError,
    UnknownMapKindError,
)
from .fock import (
    BasicKind,
    FockOperator,
    MatrixLike,
    Spectrum,
    TruncationConfig,
    ancilla_partial_trace,
    as_matrix,
    build_basic_operator,
    displacement_operator,
    hadamard_product,
    hermitian_spectrum,
    hermiticity_defect,
    unitarity_defect,
)
from .geometry import Disk, DiskCluster, Rectangle, Region

logger = logging.getLogger(__name__)

# Seuil relatif (à max|λ|) des indices propres dont les sommes sont contrôlées
SIGNIFICANT_EIGENVALUE = 1e-3

# Écart maximal |G†G − 1| toléré sur le bloc effectif
UNITARITY_TOL = 1e-6


class MapKind(Enum):
    """Familles d'applications CPTI."""
    ROTATION = "rotation"
    REFLECTION = "reflection"
    POLYGON = "polygon"
    DISPLACEMENT = "displacement"
    WEST = "west"
    NORTH = "north"
    TILE_STEP = "tile-step"
    FAN = "fan"
    BUNDLE = "bundle"
    COMPOSED = "composed"


@dataclass(frozen=True, eq=False)
class KrausMap:
    """Application ε(X) = Σ G X G† définie par ses générateurs."""
    generators: tuple[np.ndarray, ...]
    kind: MapKind
    params: dict[str, Any] = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        if not self.generators:
            raise MapParameterError("Application sans générateur")
        frozen = []
        for g in self.generators:
            matrix = np.array(as_matrix(g), dtype=complex)
            if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
                raise DimensionMismatchError(f"Générateur non carré: {matrix.shape}")
            if frozen and matrix.shape != frozen[0].shape:
                raise DimensionMismatchError(
                    f"Générateurs de formes différentes: {frozen[0].shape} et {matrix.shape}"
                )
            matrix.setflags(write=False)
            frozen.append(matrix)
        object.__setattr__(self, "generators", tuple(frozen))

    @property
    def dim(self) -> int:
        return int(self.generators[0].shape[0])

    def __len__(self) -> int:
        return len(self.generators)

    def adjoint(self) -> "KrausMap":
        """Application duale ε*(ρ) = Σ G† ρ G, vue comme application de Kraus."""
        return KrausMap(tuple(g.conj().T for g in self.generators), self.kind,
                        dict(self.params), f"{self.label}*")


def _param(params: Mapping[str, Any], name: str, kind: MapKind) -> float:
    if name not in params:
        raise MapParameterError(f"Paramètre '{name}' manquant pour l'application {kind.value}")
    value = float(params[name])
    if not np.isfinite(value):
        raise MapParameterError(f"Paramètre '{name}' non fini: {value}")
    return value


def _rotation(angle: float, cfg: TruncationConfig) -> np.ndarray:
    return build_basic_operator(BasicKind.ROTATION, cfg, angle).entries


def _displacement(q: float, p: float, cfg: TruncationConfig) -> np.ndarray:
    return displacement_operator(q, p, cfg).entries


def make_map(kind: MapKind | str, params: Mapping[str, Any] | None,
             cfg: TruncationConfig) -> KrausMap:
    """
    Construit une application CPTI d'une famille donnée.

    Args:
        kind: Famille (voir MapKind)
        params: Paramètres nommés : ``phi`` (rotation, fan), ``sides`` (polygon),
            ``q``/``p`` (displacement, west, north), ``mu``/``nu`` (tile-step),
            ``offsets`` (bundle)
        cfg: Configuration de troncature

    Returns:
        KrausMap: générateurs de la famille

    Raises:
        UnknownMapKindError: famille inconnue
        MapParameterError: paramètre manquant ou invalide, ou générateur non
            unitaire sur le bloc effectif (coupure trop basse pour le déplacement)
    """
    try:
        kind = MapKind(kind)
    except ValueError as e:
        raise UnknownMapKindError(f"Type d'application inconnu: {kind}") from e
    params = dict(params or {})
    identity = np.eye(cfg.dim, dtype=complex)

    if kind is MapKind.ROTATION:
        phi = _param(params, "phi", kind)
        generators = [identity, _rotation(phi, cfg)]
        label = f"rotation({phi!r})"
    elif kind is MapKind.REFLECTION:
        generators = [identity, build_basic_operator(BasicKind.PARITY, cfg).entries]
        label = "reflection-origin"
    elif kind is MapKind.POLYGON:
        sides = params.get("sides")
        if sides is None or int(sides) != sides or sides < 3:
            raise MapParameterError(f"Nombre de côtés invalide: {sides} (minimum 3)")
        sides = int(sides)
        generators = [_rotation(2.0 * np.pi * j / sides, cfg) for j in range(sides)]
        label = f"polygon({sides})"
    elif kind is MapKind.DISPLACEMENT:
        q, p = _param(params, "q", kind), _param(params, "p", kind)
        generators = [identity, _displacement(q, p, cfg)]
        label = f"displacement({q!r},{p!r})"
    elif kind is MapKind.WEST:
        q = _param(params, "q", kind)
        generators = [identity, _displacement(q, 0.0, cfg)]
        label = f"west({q!r})"
    elif kind is MapKind.NORTH:
        p = _param(params, "p", kind)
        generators = [identity, _displacement(0.0, p, cfg)]
        label = f"north({p!r})"
    elif kind is MapKind.TILE_STEP:
        mu, nu = _param(params, "mu", kind), _param(params, "nu", kind)
        # D(0,ν)D(μ,0) = e^{iμν/2} D(μ,ν)
        generators = [identity, _displacement(mu, 0.0, cfg), _displacement(0.0, nu, cfg),
                      np.exp(0.5j * mu * nu) * _displacement(mu, nu, cfg)]
        label = f"tile-step({mu!r},{nu!r})"
    elif kind is MapKind.FAN:
        phi = _param(params, "phi", kind)
        generators = [identity, _rotation(phi, cfg), _rotation(-phi, cfg)]
        label = f"fan({phi!r})"
    elif kind is MapKind.BUNDLE:
        offsets = [float(x) for x in params.get("offsets", ())]
        if not offsets or not np.all(np.isfinite(offsets)):
            raise MapParameterError(f"Décalages de faisceau invalides: {offsets}")
        generators = [_displacement(x - offsets[0], 0.0, cfg) for x in offsets]
        label = f"bundle({len(offsets)})"
    else:
        raise UnknownMapKindError("Une application composée se construit avec compose_maps")

    for index, g in enumerate(generators):
        defect = unitarity_defect(g, cfg)
        if defect > UNITARITY_TOL:
            raise MapParameterError(
                f"Générateur {index} de {label} non unitaire sur le bloc effectif "
                f"(écart {defect:.2e}) : augmenter la dimension ou réduire le bloc effectif"
            )
    return KrausMap(tuple(generators), kind, params, label)


def compose_maps(outer: KrausMap, inner: KrausMap) -> KrausMap:
    """ε_outer ∘ ε_inner : générateurs G_o·G_i, indice extérieur le plus lent."""
    if outer.dim != inner.dim:
        raise DimensionMismatchError(f"Dimensions {outer.dim} et {inner.dim}")
    generators = tuple(go @ gi for go in outer.generators for gi in inner.generators)
    return KrausMap(generators, MapKind.COMPOSED,
                    {"outer": outer.label, "inner": inner.label},
                    f"{outer.label}∘{inner.label}")


def hexagon_map(cfg: TruncationConfig) -> KrausMap:
    """ε₂∘ε₁ : éventail {1, R(π/3), R(−π/3)} suivi de la parité."""
    fan = make_map(MapKind.FAN, {"phi": np.pi / 3}, cfg)
    return compose_maps(make_map(MapKind.REFLECTION, None, cfg), fan)


def _check_dims(kraus: KrausMap, operator: FockOperator) -> None:
    if operator.dim != kraus.dim:
        raise DimensionMismatchError(
            f"Opérateur de dimension {operator.dim}, application de dimension {kraus.dim}"
        )


def apply_kraus_map(kraus: KrausMap, operator: FockOperator) -> FockOperator:
    """
    ε(X) = Σ G X G†, sommé dans l'ordre des générateurs.

    L'hermiticité de X est conservée.
    """
    _check_dims(kraus, operator)
    x = operator.entries
    total = np.zeros_like(x)
    for g in kraus.generators:
        total += g @ x @ g.conj().T
    if operator.hermitian_hint:
        total = 0.5 * (total + total.conj().T)
    return FockOperator(total, hermitian_hint=operator.hermitian_hint,
                        label=f"{kraus.label}[{operator.label}]", params=dict(operator.params))


def dual_apply(kraus: KrausMap, state: FockOperator, tol: float = 1e-9) -> FockOperator:
    """
    Application duale ε*(ρ) = Σ G† ρ G sur un état.

    Raises:
        NotHermitianError: ρ non hermitien
        NumericalPreconditionError: trace de ρ différente de 1
    """
    _check_dims(kraus, state)
    rho = state.entries
    if hermiticity_defect(rho) > tol:
        raise NotHermitianError(f"État non hermitien (écart {hermiticity_defect(rho):.3e})")
    if abs(np.trace(rho) - 1.0) > tol:
        raise NumericalPreconditionError(f"Trace de l'état différente de 1: {np.trace(rho):.6g}")
    total = np.zeros_like(rho)
    for g in kraus.generators:
        total += g.conj().T @ rho @ g
    total = 0.5 * (total + total.conj().T)
    return FockOperator(total, hermitian_hint=True, label=f"{kraus.label}*[{state.label}]")


def dilation_unitary(kraus: KrausMap) -> np.ndarray:
    """
    Bloc 2d×2d [[1, −G†], [G, 1]] dilatant l'application {1, G}.

    Avec l'ancilla dans |0⟩ on retrouve X + G X G† ; V V† = 2·1 dès que G est
    unitaire. Pour G = D(q′,0) c'est l'extension unitaire du déplacement ouest.

    Raises:
        MapParameterError: pas exactement deux générateurs, ou premier différent de 1
    """
    if len(kraus) != 2:
        raise MapParameterError(f"Deux générateurs attendus, {len(kraus)} reçus")
    first, g = kraus.generators
    if not np.allclose(first, np.eye(kraus.dim), atol=1e-12):
        raise MapParameterError("Le premier générateur doit être l'identité")
    identity = np.eye(kraus.dim, dtype=complex)
    return np.block([[identity, -g.conj().T], [g, identity]])


def fourier_dilation(kraus: KrausMap) -> np.ndarray:
    """
    Dilatation à M blocs ⟨j|V|k⟩ = ω^{jk} G_j, ω = e^{2iπ/M}.

    Chaque colonne k de l'ancilla reproduit la somme de Kraus ; V V† = M·1
    lorsque les générateurs sont unitaires.
    """
    count = len(kraus)
    omega = np.exp(2j * np.pi * np.arange(count)[:, None] * np.arange(count)[None, :] / count)
    blocks = [[omega[j, k] * kraus.generators[j] for k in range(count)] for j in range(count)]
    return np.block(blocks)


def polygon_dilation(sides: int, cfg: TruncationConfig) -> np.ndarray:
    """Dilatation de l'application polygone : la colonne k = 0 contient R(2πj/M)."""
    return fourier_dilation(make_map(MapKind.POLYGON, {"sides": sides}, cfg))


def _ancilla_embedding(operator: MatrixLike, ancilla_dim: int, index: int) -> np.ndarray:
    if not 0 <= index < ancilla_dim:
        raise DimensionMismatchError(f"Indice d'ancilla {index} hors de [0, {ancilla_dim})")
    selector = np.zeros((ancilla_dim, ancilla_dim))
    selector[index, index] = 1.0
    return np.kron(selector, as_matrix(operator))


def dilated_apply(dilation: np.ndarray, operator: FockOperator, ancilla_dim: int,
                  index: int = 0) -> FockOperator:
    """Tr_A V(|k⟩⟨k| ⊗ X)V†."""
    v = np.asarray(dilation, dtype=complex)
    if v.shape != (ancilla_dim * operator.dim,) * 2:
        raise DimensionMismatchError(
            f"Dilatation de forme {v.shape} pour ancilla {ancilla_dim} et d={operator.dim}"
        )
    embedded = _ancilla_embedding(operator, ancilla_dim, index)
    return ancilla_partial_trace(v @ embedded @ v.conj().T, ancilla_dim)


def dilated_dual_apply(dilation: np.ndarray, state: FockOperator, ancilla_dim: int,
                       index: int = 0) -> FockOperator:
    """Tr_A V†(|k⟩⟨k| ⊗ ρ)V ; avec [[1, −G†], [G, 1]] et k = 1 on obtient ρ + G†ρG."""
    v = np.asarray(dilation, dtype=complex)
    if v.shape != (ancilla_dim * state.dim,) * 2:
        raise DimensionMismatchError(
            f"Dilatation de forme {v.shape} pour ancilla {ancilla_dim} et d={state.dim}"
        )
    embedded = _ancilla_embedding(state, ancilla_dim, index)
    return ancilla_partial_trace(v.conj().T @ embedded @ v, ancilla_dim)


def dilation_gram_defect(dilation: np.ndarray, ancilla_dim: int, factor: float,
                         cfg: TruncationConfig) -> float:
    """max |V V† − factor·1| restreint aux blocs effectifs de chaque paire (j, l)."""
    v = np.asarray(dilation, dtype=complex)
    d, e = cfg.dim, cfg.effective_dim
    gram = (v @ v.conj().T).reshape(ancilla_dim, d, ancilla_dim, d)[:, :e, :, :e]
    target = factor * np.einsum("jl,ab->jalb", np.eye(ancilla_dim), np.eye(e))
    return float(np.max(np.abs(gram - target)))


def local_unitary_dilation(dilation: np.ndarray, local: np.ndarray) -> np.ndarray:
    """(W ⊗ 1)·V : même application réduite pour tout W unitaire sur l'ancilla."""
    local = np.asarray(local, dtype=complex)
    d = np.asarray(dilation).shape[0] // local.shape[0]
    return np.kron(local, np.eye(d)) @ dilation


@dataclass(frozen=True, eq=False)
class StepMatrix:
    """
    Matrice de pas S = Σ_G (W†GV)∘conj(W†GV) entre deux bases propres.

    Les sommes de lignes (resp. colonnes) sont contrôlées sur les indices
    propres de ε(X) (resp. X) de valeur propre significative :
    |λ| > SIGNIFICANT_EIGENVALUE·max|λ|. Les vecteurs du noyau, arbitraires
    dans un sous-espace dégénéré, en sont exclus.
    """
    entries: np.ndarray
    expected_sum: float
    name: str
    update_residual: float
    row_deviation: float
    col_deviation: float
    checked_rows: np.ndarray
    checked_cols: np.ndarray

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0)

    @property
    def checked_counts(self) -> tuple[int, int]:
        """Nombres de lignes et de colonnes contrôlées."""
        return int(np.count_nonzero(self.checked_rows)), int(np.count_nonzero(self.checked_cols))

    def covers(self, cfg: TruncationConfig) -> bool:
        """Au moins la moitié du bloc effectif est contrôlée en lignes et en colonnes."""
        needed = max(1, cfg.effective_dim // 2)
        return min(self.checked_counts) >= needed


def _step_name(kraus: KrausMap) -> str:
    if kraus.kind is MapKind.TILE_STEP:
        return "gamma"
    if len(kraus) == 2:
        return "sigma"
    return "step"


def _significant(eigenvalues: np.ndarray) -> np.ndarray:
    scale = float(np.max(np.abs(eigenvalues), initial=0.0))
    return np.abs(eigenvalues) > SIGNIFICANT_EIGENVALUE * scale


def _masked_deviation(sums: np.ndarray, mask: np.ndarray, expected: float) -> float:
    if not np.any(mask):
        logger.warning("Aucune valeur propre significative : sommes non contrôlées")
        return float("nan")
    return float(np.max(np.abs(sums[mask] - expected)))


def step_matrix(kraus: KrausMap, before: Spectrum, after: Spectrum,
                cfg: TruncationConfig, name: str | None = None) -> StepMatrix:
    """
    Matrice de pas reliant le spectre de X à celui de ε(X) : λ′ = Sλ.

    Args:
        kraus: Application appliquée
        before: Spectre (V, λ) de X
        after: Spectre (W, λ′) de ε(X)
        cfg: Configuration de troncature
        name: Nom du diagnostic ("sigma", "gamma", "epsilon")

    Returns:
        StepMatrix: matrice, sommes et résidu de la mise à jour

    Raises:
        DimensionMismatchError: spectres de dimensions différentes
    """
    if before.dim != after.dim or before.dim != kraus.dim:
        raise DimensionMismatchError(
            f"Spectres de dimensions {before.dim} et {after.dim}, application {kraus.dim}"
        )
    v, w = before.eigenvectors, after.eigenvectors
    entries = np.zeros((kraus.dim, kraus.dim))
    for g in kraus.generators:
        u = w.conj().T @ g @ v
        entries += np.real(hadamard_product(u, u.conj()))

    expected = float(len(kraus))
    checked_rows = _significant(after.eigenvalues)
    checked_cols = _significant(before.eigenvalues)
    residual = float(np.max(np.abs(after.eigenvalues - entries @ before.eigenvalues)))
    checked_rows.setflags(write=False)
    checked_cols.setflags(write=False)
    entries.setflags(write=False)
    result = StepMatrix(
        entries=entries,
        expected_sum=expected,
        name=name or _step_name(kraus),
        update_residual=residual,
        row_deviation=_masked_deviation(entries.sum(axis=1), checked_rows, expected),
        col_deviation=_masked_deviation(entries.sum(axis=0), checked_cols, expected),
        checked_rows=checked_rows,
        checked_cols=checked_cols,
    )
    if not result.covers(cfg):
        logger.warning("Matrice de pas %s : %d lignes et %d colonnes contrôlées seulement",
                       result.name, *result.checked_counts)
    return result


def diagonal_transfer(kraus: KrausMap, diagonal: np.ndarray,
                      cfg: TruncationConfig) -> np.ndarray:
    """
    Diagonale de ε(diag(d)) : Σ_G (G∘Ḡ)·d.

    Raises:
        DimensionMismatchError: longueur de d différente de la dimension
    """
    diagonal = np.asarray(diagonal, dtype=float)
    if diagonal.shape != (kraus.dim,) or kraus.dim != cfg.dim:
        raise DimensionMismatchError(
            f"Vecteur de longueur {diagonal.shape}, dimension attendue {kraus.dim}"
        )
    result = np.zeros(kraus.dim)
    for g in kraus.generators:
        result += np.real(hadamard_product(g, g.conj())) @ diagonal
    return result


class TilingMode(Enum):
    """Forme du domaine pavé."""
    RECTANGLE = "rectangle"
    DISK = "disk"


@dataclass(frozen=True, eq=False)
class TilingStep:
    """Un enregistrement du pavage : région couverte, spectre, bornes et diagnostics."""
    index: int
    region: Region
    operator: FockOperator
    spectrum: Spectrum
    lambda_min: float
    lambda_max: float
    trace: float
    area: float
    step: StepMatrix | None = None


@dataclass(frozen=True, eq=False)
class TilingTrace:
    """Suite des enregistrements d'un pavage ouest-nord."""
    mode: TilingMode
    steps: tuple[TilingStep, ...]
    growth: int = 4

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def final_operator(self) -> FockOperator:
        return self.steps[-1].operator


def _initial_cluster(region: Region) -> DiskCluster:
    if isinstance(region, DiskCluster):
        return region
    if isinstance(region, Disk):
        cq, cp = region.center
        if cq != cp:
            raise RegionError(f"Disque de départ hors de la diagonale: {region.describe()}")
        return DiskCluster(float(cq), region.diameter, 0)
    raise RegionError(f"Région non prise en charge pour le pavage de disques: {region.describe()}")


def _record(index: int, region: Region, operator: FockOperator, cfg: TruncationConfig,
            step: StepMatrix | None = None) -> TilingStep:
    spectrum = hermitian_spectrum(operator, cfg.tol)
    return TilingStep(
        index=index,
        region=region,
        operator=operator,
        spectrum=spectrum,
        lambda_min=float(spectrum.eigenvalues[-1]),
        lambda_max=float(spectrum.eigenvalues[0]),
        trace=float(np.real(operator.trace())),
        area=region.area(),
        step=step,
    )


def tile_run(initial: FockOperator, region: Region, steps: int, mode: TilingMode | str,
             cfg: TruncationConfig, compress: bool = False) -> TilingTrace:
    """
    Pavage ouest-nord : X_{k+1} = ε_{(μ,ν)}(X_k), aire quadruplée à chaque pas.

    Rectangle : (μ, ν) = (A, B) puis doublés à chaque pas. Disques : grappe
    carrée de côté m+1 décalée de (m+1)·d dans chaque direction.

    Args:
        initial: Opérateur de la région de départ
        region: Rectangle, disque de centre (c, c) ou grappe de disques
        steps: Nombre de pas (0 = enregistrement initial seul)
        mode: "rectangle" ou "disk"
        cfg: Configuration de troncature
        compress: Projeter l'opérateur initial sur le bloc effectif (diagnostics de
            majorisation) ; sans projection, un pas redonne la quadrature directe

    Returns:
        TilingTrace: steps + 1 enregistrements

    Raises:
        RegionError: région incompatible avec le mode
        MapParameterError: pas non représentable à cette coupure
    """
    mode = TilingMode(mode)
    if steps < 0:
        raise RegionError(f"Nombre de pas invalide: {steps}")
    if mode is TilingMode.RECTANGLE and not isinstance(region, Rectangle):
        raise RegionError(f"Pavage rectangulaire d'une région {region.describe()}")
    current: Region = region if mode is TilingMode.RECTANGLE else _initial_cluster(region)

    operator = initial.compressed(cfg) if compress else initial
    records = [_record(0, current, operator, cfg)]
    for index in range(1, steps + 1):
        if isinstance(current, Rectangle):
            mu, nu = current.width, current.height
            following: Region = Rectangle(current.x0, current.k0, 2.0 * mu, 2.0 * nu)
            name = "gamma"
        elif isinstance(current, DiskCluster):
            mu = nu = current.side * current.spacing
            following = DiskCluster(current.c, current.spacing, 2 * current.side - 1)
            name = "epsilon"
        else:
            raise RegionError(f"Région non prise en charge: {current.describe()}")
        kraus = make_map(MapKind.TILE_STEP, {"mu": mu, "nu": nu}, cfg)
        operator = apply_kraus_map(kraus, operator)
        previous = records[-1]
        record = _record(index, following, operator, cfg)
        diagnostics = step_matrix(kraus, previous.spectrum, record.spectrum, cfg, name)
        records.append(replace(record, step=diagnostics))
        logger.debug("Pas %d : aire %.6g, λ ∈ [%.6g, %.6g], résidu %.2e", index,
                     record.area, record.lambda_min, record.lambda_max,
                     diagnostics.update_residual)
        current = following
    return TilingTrace(mode, tuple(records))
