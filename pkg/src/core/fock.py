"""
Algèbre d'opérateurs dans la base de Fock tronquée.

Toutes les matrices sont denses. Les identités valables en dimension infinie
(unitarité, commutateurs canoniques) ne sont vérifiées que sur le bloc
effectif, c'est-à-dire le coin supérieur gauche de taille ``effective_dim``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterator, Union

import numpy as np
from scipy import linalg
from scipy.special import gammaln

from .errors import (
    DimensionMismatchError,
    InvalidTruncationError,
    NotHermitianError,
    NumericalPreconditionError,
)

logger = logging.getLogger(__name__)

# Nombre maximal d'éléments de matrice calculés par lot de déplacements
MAX_CHUNK_ELEMENTS = 1 << 21

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class TruncationConfig:
    """
    Paramètres de troncature de l'espace de Fock.

    Args:
        dim: Dimension de coupure d (au moins 2)
        effective_dim: Taille du bloc effectif (0 = d // 2)
        tol: Tolérance des identités algébriques
        quadrature_tol: Tolérance des identités limitées par la quadrature
    """
    dim: int
    effective_dim: int = 0
    tol: float = 1e-9
    quadrature_tol: float = 1e-4

    def __post_init__(self):
        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 2:
            raise InvalidTruncationError(f"Dimension invalide: {self.dim} (minimum 2)")
        object.__setattr__(self, "dim", int(self.dim))
        if not self.effective_dim:
            object.__setattr__(self, "effective_dim", self.dim // 2)
        if not 1 <= self.effective_dim <= self.dim:
            raise InvalidTruncationError(
                f"Bloc effectif invalide: {self.effective_dim} (attendu entre 1 et {self.dim})"
            )
        if not self.tol > 0 or not self.quadrature_tol > 0:
            raise InvalidTruncationError(
                f"Tolérances invalides: tol={self.tol}, quadrature_tol={self.quadrature_tol}"
            )

    def with_dim(self, dim: int) -> "TruncationConfig":
        """Même configuration avec une autre coupure (bloc effectif par défaut)."""
        return TruncationConfig(dim=dim, tol=self.tol, quadrature_tol=self.quadrature_tol)


@dataclass(frozen=True, eq=False)
class FockOperator:
    """
    Matrice complexe dense sur la base de Fock tronquée.

    Les coefficients sont copiés puis rendus non modifiables à la construction.
    """
    entries: np.ndarray
    hermitian_hint: bool = False
    label: str = ""
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        matrix = np.array(self.entries, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"Matrice carrée attendue, forme reçue {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise NumericalPreconditionError(f"Coefficients non finis dans '{self.label}'")
        if self.hermitian_hint:
            defect = hermiticity_defect(matrix)
            if defect > 1e-9 * max(1.0, float(np.max(np.abs(matrix)))):
                raise NotHermitianError(
                    f"Opérateur '{self.label}' déclaré hermitien (écart {defect:.3e})"
                )
        matrix.setflags(write=False)
        object.__setattr__(self, "entries", matrix)

    @property
    def dim(self) -> int:
        """Dimension de la troncature."""
        return int(self.entries.shape[0])

    def dagger(self) -> "FockOperator":
        """Adjoint hermitien."""
        return FockOperator(
            self.entries.conj().T, hermitian_hint=self.hermitian_hint,
            label=f"{self.label}†", params=dict(self.params),
        )

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def effective_block(self, cfg: TruncationConfig) -> np.ndarray:
        """Coin supérieur gauche de taille ``effective_dim``."""
        e = cfg.effective_dim
        return np.array(self.entries[:e, :e])

    def compressed(self, cfg: TruncationConfig) -> "FockOperator":
        """Projection P K P sur le bloc effectif, complétée par des zéros."""
        matrix = np.zeros_like(self.entries)
        e = cfg.effective_dim
        matrix[:e, :e] = self.entries[:e, :e]
        params = dict(self.params)
        params["compressed_to"] = e
        return FockOperator(matrix, hermitian_hint=self.hermitian_hint,
                            label=self.label, params=params)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Valeurs propres décroissantes et vecteurs propres associés (en colonnes)."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> np.ndarray:
        """Recompose V Λ V†."""
        v = self.eigenvectors
        return (v * self.eigenvalues[None, :]) @ v.conj().T

    def tail_weights(self, cfg: TruncationConfig) -> np.ndarray:
        """Poids de chaque vecteur propre hors du bloc effectif."""
        tail = self.eigenvectors[cfg.effective_dim:, :]
        return np.sum(np.abs(tail) ** 2, axis=0)


class BasicKind(Enum):
    """Opérateurs élémentaires de l'oscillateur."""
    ANNIHILATION = "annihilation"
    CREATION = "creation"
    NUMBER = "number"
    POSITION = "position"
    MOMENTUM = "momentum"
    ROTATED_QUADRATURE = "rotated_quadrature"
    PARITY = "parity"
    ROTATION = "rotation"


_HERMITIAN_KINDS = {
    BasicKind.NUMBER, BasicKind.POSITION, BasicKind.MOMENTUM,
    BasicKind.ROTATED_QUADRATURE, BasicKind.PARITY,
}

MatrixLike = Union[FockOperator, np.ndarray]


def as_matrix(operator: MatrixLike) -> np.ndarray:
    """Retourne la matrice complexe d'un opérateur ou d'un tableau."""
    if isinstance(operator, FockOperator):
        return operator.entries
    return np.asarray(operator, dtype=complex)


def hermiticity_defect(matrix: MatrixLike) -> float:
    """max |A − A†|."""
    m = as_matrix(matrix)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def require_hermitian(operator: MatrixLike, tol: float = 1e-9) -> np.ndarray:
    """
    Vérifie l'hermiticité et retourne la partie hermitienne exacte.

    Raises:
        NotHermitianError: si max|A − A†| dépasse tol·max(1, max|A|)
    """
    m = as_matrix(operator)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"Matrice carrée attendue, forme reçue {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    defect = hermiticity_defect(m)
    if defect > tol * scale:
        raise NotHermitianError(f"Opérateur non hermitien (écart {defect:.3e})")
    return 0.5 * (m + m.conj().T)


def build_basic_operator(kind: BasicKind | str, cfg: TruncationConfig,
                         theta: float = 0.0) -> FockOperator:
    """
    Construit un opérateur élémentaire dans la base tronquée.

    Args:
        kind: Type d'opérateur (voir BasicKind)
        cfg: Configuration de troncature
        theta: Angle en radians (quadrature tournée et rotation)

    Returns:
        FockOperator: a, a†, N, Q, P, Q_θ, Π ou R(θ)
    """
    kind = BasicKind(kind)
    if not np.isfinite(theta):
        raise NumericalPreconditionError(f"Angle non fini: {theta}")
    d = cfg.dim
    n = np.arange(d)
    a = np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex)
    a_dag = a.conj().T
    position = (a + a_dag) / np.sqrt(2.0)
    momentum = 1j * (a_dag - a) / np.sqrt(2.0)

    if kind is BasicKind.ANNIHILATION:
        matrix = a
    elif kind is BasicKind.CREATION:
        matrix = a_dag
    elif kind is BasicKind.NUMBER:
        matrix = np.diag(n).astype(complex)
    elif kind is BasicKind.POSITION:
        matrix = position
    elif kind is BasicKind.MOMENTUM:
        matrix = momentum
    elif kind is BasicKind.ROTATED_QUADRATURE:
        matrix = position * np.cos(theta) + momentum * np.sin(theta)
    elif kind is BasicKind.PARITY:
        matrix = np.diag((-1.0) ** n).astype(complex)
    else:
        matrix = np.diag(np.exp(1j * n * theta))

    params: dict[str, Any] = {}
    if kind in (BasicKind.ROTATED_QUADRATURE, BasicKind.ROTATION):
        params["theta"] = float(theta)
    return FockOperator(matrix, hermitian_hint=kind in _HERMITIAN_KINDS,
                        label=kind.value, params=params)


def parity_signs(dim: int) -> np.ndarray:
    """Diagonale (−1)ⁿ de l'opérateur de parité."""
    return (-1.0) ** np.arange(dim)


def _laguerre_table(x: np.ndarray, dim: int) -> np.ndarray:
    """
    Table L_n^{(k)}(x) pour n, k < dim, par récurrence ascendante en n.

    Returns:
        np.ndarray: forme (len(x), dim, dim), indexée [point, n, k]
    """
    k = np.arange(dim, dtype=float)[None, :]
    xs = x[:, None]
    table = np.empty((x.size, dim, dim))
    table[:, 0, :] = 1.0
    if dim > 1:
        table[:, 1, :] = 1.0 + k - xs
    for n in range(1, dim - 1):
        table[:, n + 1, :] = (
            (2 * n + 1 + k - xs) * table[:, n, :] - (n + k) * table[:, n - 1, :]
        ) / (n + 1)
    return table


def _displacement_block(alphas: np.ndarray, dim: int) -> np.ndarray:
    """Blocs ⟨m|D(α)|n⟩ pour un lot de α, forme (len(alphas), dim, dim)."""
    rows, cols = np.tril_indices(dim)
    offsets = rows - cols
    # √(n!/m!) pour m ≥ n, en log
    log_ratio = 0.5 * (gammaln(cols + 1.0) - gammaln(rows + 1.0))

    x = np.abs(alphas) ** 2
    log_r = np.log(np.maximum(np.abs(alphas), _TINY))
    angle = np.angle(alphas)
    table = _laguerre_table(x, dim)

    log_mag = log_ratio[None, :] + offsets[None, :] * log_r[:, None] - 0.5 * x[:, None]
    lower = np.exp(log_mag + 1j * offsets[None, :] * angle[:, None]) * table[:, cols, offsets]

    out = np.zeros((alphas.size, dim, dim), dtype=complex)
    out[:, rows, cols] = lower
    strict = offsets > 0
    # ⟨n|D(α)|m⟩ = (−1)^{m−n} conj⟨m|D(α)|n⟩ d'après D†(α) = D(−α)
    sign = (-1.0) ** offsets[strict]
    out[:, cols[strict], rows[strict]] = sign[None, :] * np.conj(lower[:, strict])
    return out


def displacement_chunks(alphas: np.ndarray, dim: int,
                        chunk: int | None = None) -> Iterator[tuple[slice, np.ndarray]]:
    """
    Parcourt les blocs de déplacement par lots de taille bornée.

    Yields:
        (tranche des α, blocs correspondants)
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    if not np.all(np.isfinite(alphas)):
        raise NumericalPreconditionError("Paramètre de déplacement non fini")
    size = chunk or max(1, MAX_CHUNK_ELEMENTS // (dim * dim))
    for start in range(0, alphas.size, size):
        part = slice(start, min(start + size, alphas.size))
        yield part, _displacement_block(alphas[part], dim)


def displacement_elements(alphas: np.ndarray, dim: int) -> np.ndarray:
    """Pile des blocs tronqués de D(α) pour chaque α (forme (N, dim, dim))."""
    blocks = [block for _, block in displacement_chunks(alphas, dim)]
    return np.concatenate(blocks, axis=0)


def displacement_operator(q: float, p: float, cfg: TruncationConfig) -> FockOperator:
    """
    Opérateur de déplacement D(q,p) = exp i(pQ − qP).

    Le bloc retourné est exactement le coin supérieur gauche de l'opérateur
    de dimension infinie : il n'est unitaire que sur le bloc effectif.

    Args:
        q: Déplacement en position
        p: Déplacement en impulsion
        cfg: Configuration de troncature

    Returns:
        FockOperator: D(q,p), avec α = (q + ip)/√2
    """
    if not (np.isfinite(q) and np.isfinite(p)):
        raise NumericalPreconditionError(f"Déplacement non fini: ({q}, {p})")
    alpha = (q + 1j * p) / np.sqrt(2.0)
    block = _displacement_block(np.array([alpha]), cfg.dim)[0]
    return FockOperator(block, label="displacement", params={"q": float(q), "p": float(p)})


def hermite_functions(x: float, dim: int) -> np.ndarray:
    """Fonctions de Hermite normalisées ψ_n(x), n < dim (récurrence à trois termes)."""
    psi = np.empty(dim)
    psi[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if dim > 1:
        psi[1] = np.sqrt(2.0) * x * psi[0]
    for n in range(1, dim - 1):
        psi[n + 1] = np.sqrt(2.0 / (n + 1)) * x * psi[n] - np.sqrt(n / (n + 1)) * psi[n - 1]
    return psi


def hermite_window(cfg: TruncationConfig) -> float:
    """Demi-largeur de la fenêtre où les amplitudes tronquées sont fiables."""
    return float(np.sqrt(2.0 * cfg.effective_dim) / 2.0)


def position_eigenvector_amplitudes(q_theta: float, theta: float,
                                    cfg: TruncationConfig) -> np.ndarray:
    """
    Amplitudes ⟨q_θ|n⟩ = ψ_n(q_θ) e^{−inθ}.

    Args:
        q_theta: Valeur propre de la quadrature tournée Q_θ
        theta: Angle de la quadrature en radians
        cfg: Configuration de troncature

    Returns:
        np.ndarray: vecteur complexe de longueur dim
    """
    if not (np.isfinite(q_theta) and np.isfinite(theta)):
        raise NumericalPreconditionError(f"Paramètres non finis: ({q_theta}, {theta})")
    if abs(q_theta) > hermite_window(cfg):
        logger.warning("q=%.4g hors de la fenêtre fiable ±%.4g (d=%d)",
                       q_theta, hermite_window(cfg), cfg.dim)
    n = np.arange(cfg.dim)
    return hermite_functions(q_theta, cfg.dim) * np.exp(-1j * n * theta)


def position_eigenvector(q_theta: float, theta: float, cfg: TruncationConfig) -> np.ndarray:
    """Composantes ⟨n|q_θ⟩ du ket |q_θ⟩ = R(θ)|q⟩."""
    return np.conj(position_eigenvector_amplitudes(q_theta, theta, cfg))


def momentum_eigenvector(p: float, cfg: TruncationConfig) -> np.ndarray:
    """Ket |p⟩, vecteur propre de P = Q_{π/2}."""
    return position_eigenvector(p, np.pi / 2, cfg)


def position_state_from_vacuum(q_theta: float, theta: float,
                               cfg: TruncationConfig) -> np.ndarray:
    """
    Ket |q_θ⟩ obtenu depuis le vide par l'exponentielle de a† et a†².

    Les composantes n < dim sont exactes car a† ne fait que monter en n.
    """
    a_dag = build_basic_operator(BasicKind.CREATION, cfg).entries
    phase = np.exp(1j * theta)
    generator = np.sqrt(2.0) * q_theta * phase * a_dag - 0.5 * phase ** 2 * (a_dag @ a_dag)
    vacuum = np.zeros(cfg.dim, dtype=complex)
    vacuum[0] = 1.0
    prefactor = np.pi ** -0.25 * np.exp(-0.5 * q_theta ** 2)
    return prefactor * (linalg.expm(generator) @ vacuum)


def coherent_vector(z: complex, cfg: TruncationConfig) -> np.ndarray:
    """Composantes tronquées de l'état cohérent |z⟩."""
    c = np.empty(cfg.dim, dtype=complex)
    c[0] = np.exp(-0.5 * abs(z) ** 2)
    for n in range(cfg.dim - 1):
        c[n + 1] = c[n] * z / np.sqrt(n + 1.0)
    return c


def coherent_position_overlap(q_theta: float, theta: float, z: complex) -> complex:
    """Forme fermée de ⟨q_θ|z⟩."""
    w = z * np.exp(-1j * theta)
    exponent = -0.5 * q_theta ** 2 + np.sqrt(2.0) * q_theta * w - 0.5 * w ** 2 - 0.5 * abs(z) ** 2
    return complex(np.pi ** -0.25 * np.exp(exponent))


def quadrature_grid(theta: float, cfg: TruncationConfig) -> np.ndarray:
    """Valeurs propres croissantes de Q_θ tronquée (zéros de H_d)."""
    q_theta = build_basic_operator(BasicKind.ROTATED_QUADRATURE, cfg, theta)
    return linalg.eigvalsh(q_theta.entries)


def nearest_grid_point(q_theta: float, theta: float, cfg: TruncationConfig) -> float:
    """Point de la grille tronquée de Q_θ le plus proche de q_θ."""
    grid = quadrature_grid(theta, cfg)
    return float(grid[int(np.argmin(np.abs(grid - q_theta)))])


def spectral_function(operator: MatrixLike, f: Callable[[float], complex],
                      tol: float = 1e-9) -> FockOperator:
    """
    Calcul fonctionnel f(A) pour A hermitien.

    Les singularités apparentes (sin(xL)/x en 0) doivent être levées par
    l'appelant : f est évaluée telle quelle sur chaque valeur propre.

    Raises:
        NotHermitianError: si A n'est pas hermitien
    """
    matrix = require_hermitian(operator, tol)
    values, vectors = linalg.eigh(matrix)
    mapped = np.array([f(float(x)) for x in values])
    result = (vectors * mapped[None, :]) @ vectors.conj().T
    real_valued = bool(np.all(np.abs(np.imag(mapped)) == 0.0))
    if real_valued:
        result = 0.5 * (result + result.conj().T)
    return FockOperator(result, hermitian_hint=real_valued, label="spectral_function")


def _lexicographic_key(vector: np.ndarray) -> tuple[float, ...]:
    pairs = np.stack([np.round(vector.real, 12), np.round(vector.imag, 12)], axis=1)
    return tuple(float(x) for x in pairs.ravel())


def hermitian_spectrum(operator: MatrixLike, tol: float = 1e-9) -> Spectrum:
    """
    Décomposition spectrale déterministe d'un opérateur hermitien.

    Valeurs propres décroissantes ; la première composante de module > tol
    de chaque vecteur propre est rendue réelle positive ; les valeurs propres
    égales à 1e-12 près sont départagées par l'ordre lexicographique des
    composantes (partie réelle, partie imaginaire).

    Raises:
        NotHermitianError: si A n'est pas hermitien
    """
    matrix = require_hermitian(operator, tol)
    values, vectors = linalg.eigh(matrix)
    order = np.argsort(-values, kind="stable")
    values = np.array(values[order])
    vectors = np.array(vectors[:, order])

    for j in range(vectors.shape[1]):
        column = vectors[:, j]
        significant = np.flatnonzero(np.abs(column) > tol)
        if significant.size:
            pivot = column[significant[0]]
            vectors[:, j] = column * (abs(pivot) / pivot)

    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    start = 0
    while start < values.size:
        stop = start + 1
        while stop < values.size and values[start] - values[stop] <= 1e-12 * scale:
            stop += 1
        if stop - start > 1:
            group = sorted(range(start, stop), key=lambda c: _lexicographic_key(vectors[:, c]))
            vectors[:, start:stop] = vectors[:, group]
        start = stop

    values.setflags(write=False)
    vectors.setflags(write=False)
    return Spectrum(eigenvalues=values, eigenvectors=vectors)


def hadamard_product(a: MatrixLike, b: MatrixLike) -> np.ndarray:
    """Produit terme à terme (A∘B)_ij = A_ij B_ij."""
    left, right = as_matrix(a), as_matrix(b)
    if left.shape != right.shape:
        raise DimensionMismatchError(f"Formes incompatibles: {left.shape} et {right.shape}")
    return left * right


def ancilla_partial_trace(block: np.ndarray, ancilla_dim: int) -> FockOperator:
    """
    Trace partielle sur un ancilla de dimension m (indice ancilla le plus lent).

    Args:
        block: Matrice (m·d)×(m·d) sur ancilla ⊗ système
        ancilla_dim: Dimension m de l'ancilla

    Returns:
        FockOperator: Tr_A du bloc, de dimension d
    """
    matrix = np.asarray(block, dtype=complex)
    if ancilla_dim < 1 or matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"Bloc invalide: forme {matrix.shape}, ancilla {ancilla_dim}")
    if matrix.shape[0] % ancilla_dim:
        raise DimensionMismatchError(
            f"Dimension {matrix.shape[0]} non divisible par l'ancilla {ancilla_dim}"
        )
    d = matrix.shape[0] // ancilla_dim
    reduced = np.einsum("ajak->jk", matrix.reshape(ancilla_dim, d, ancilla_dim, d))
    return FockOperator(reduced, label="partial_trace")


def unitarity_defect(operator: MatrixLike, cfg: TruncationConfig) -> float:
    """max |U†U − 1| sur le bloc effectif."""
    u = as_matrix(operator)
    e = cfg.effective_dim
    gram = u.conj().T @ u
    return float(np.max(np.abs(gram[:e, :e] - np.eye(e))))


def block_distance(a: MatrixLike, b: MatrixLike, cfg: TruncationConfig,
                   norm: str = "max") -> float:
    """Écart entre deux opérateurs restreint au bloc effectif ('max' ou 'fro')."""
    e = cfg.effective_dim
    diff = as_matrix(a)[:e, :e] - as_matrix(b)[:e, :e]
    if norm == "fro":
        return float(np.linalg.norm(diff))
    return float(np.max(np.abs(diff)))
