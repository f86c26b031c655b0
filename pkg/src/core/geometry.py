"""
Algèbre des régions de l'espace des phases.

Primitives (point, segment, droite, rectangle, disque, triangle isocèle,
polygone régulier, grappe de disques), transformations rigides et unions
disjointes. Chaque région connaît son aire, son appartenance et ses nœuds
de quadrature.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import RegionError

logger = logging.getLogger(__name__)

# Tolérance d'appartenance pour les régions de mesure nulle
_MEASURE_ZERO_TOL = 1e-12

# Aire commune tolérée entre deux membres d'une réunion disjointe, relative au plus petit
_OVERLAP_TOL = 1e-3
_OVERLAP_SAMPLES = 20_000


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Paramètres de quadrature.

    Args:
        order: Nombre de nœuds par axe
        max_order: Ordre maximal du raffinement par doublement (None = pas de raffinement)
        refine_tol: Écart de Frobenius arrêtant le raffinement
        workers: Nombre de threads pour l'accumulation
    """
    order: int = 64
    max_order: int | None = 256
    refine_tol: float = 1e-6
    workers: int = 1

    def __post_init__(self):
        if self.order < 4:
            raise RegionError(f"Ordre de quadrature invalide: {self.order} (minimum 4)")
        if self.max_order is not None and self.max_order < self.order:
            raise RegionError(f"Ordre maximal {self.max_order} inférieur à l'ordre {self.order}")
        if self.workers < 1:
            raise RegionError(f"Nombre de threads invalide: {self.workers}")

    def with_order(self, order: int) -> "QuadratureSpec":
        return QuadratureSpec(order=order, max_order=None, workers=self.workers)


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Nœuds de quadrature (points (N, 2)) et poids (N,)."""
    points: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return int(self.weights.size)

    def __iter__(self) -> Iterator[tuple[tuple[float, float], float]]:
        for (q, p), w in zip(self.points, self.weights):
            yield (float(q), float(p)), float(w)

    def mapped(self, matrix: np.ndarray, shift=(0.0, 0.0)) -> "NodeSet":
        """Image des nœuds par x ↦ M x + shift (poids inchangés, M orthogonale)."""
        points = self.points @ np.asarray(matrix).T + np.asarray(shift)[None, :]
        return NodeSet(points, self.weights)

    @staticmethod
    def concatenate(parts: list["NodeSet"]) -> "NodeSet":
        if not parts:
            return NodeSet(np.zeros((0, 2)), np.zeros(0))
        return NodeSet(np.concatenate([n.points for n in parts]),
                       np.concatenate([n.weights for n in parts]))


@lru_cache(maxsize=32)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(order: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Nœuds et poids de Gauss-Legendre sur [a, b]."""
    x, w = _legendre(order)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def rotation_matrix(angle: float) -> np.ndarray:
    """Rotation d'angle ``angle`` dans le sens trigonométrique."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def format_number(value: float) -> str:
    """Écriture décimale la plus courte relue à l'identique."""
    return repr(float(value))


def triangle_nodes(a: np.ndarray, b: np.ndarray, c: np.ndarray, order: int) -> NodeSet:
    """
    Nœuds sur le triangle (a, b, c) par image affine du carré unité.

    x = a + u[(1 − v)(b − a) + v(c − a)], jacobien u·|det(b − a, c − a)|.
    """
    u, wu = gauss_legendre(order, 0.0, 1.0)
    v, wv = gauss_legendre(order, 0.0, 1.0)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    e1, e2 = b - a, c - a
    det = abs(e1[0] * e2[1] - e1[1] * e2[0])
    direction = (1.0 - vv)[..., None] * e1 + vv[..., None] * e2
    points = a + uu[..., None] * direction
    weights = np.outer(wu * u, wv) * det
    return NodeSet(points.reshape(-1, 2), weights.ravel())


def disk_nodes(center: tuple[float, float], radius: float, order: int) -> NodeSet:
    """Nœuds polaires : Gauss radial et angles uniformes (2·order directions)."""
    r, wr = gauss_legendre(order, 0.0, radius)
    n_angles = 2 * order
    phi = 2.0 * np.pi * np.arange(n_angles) / n_angles
    rr, pp = np.meshgrid(r, phi, indexing="ij")
    points = np.stack([center[0] + rr * np.cos(pp), center[1] + rr * np.sin(pp)], axis=-1)
    weights = np.outer(wr * r, np.full(n_angles, 2.0 * np.pi / n_angles))
    return NodeSet(points.reshape(-1, 2), weights.ravel())


class Region(ABC):
    """
    Domaine de l'espace des phases (q, p).

    Les sous-classes sont des valeurs immuables.
    """

    @property
    def dimension(self) -> int:
        """Dimension géométrique : 0 (point), 1 (segment, droite) ou 2."""
        return 2

    @abstractmethod
    def area(self) -> float:
        """Aire exacte."""

    @abstractmethod
    def contains_many(self, q: np.ndarray, p: np.ndarray) -> np.ndarray:
        """Appartenance vectorisée, bord compris."""

    @abstractmethod
    def nodes(self, spec: QuadratureSpec) -> NodeSet:
        """Nœuds de quadrature de la région."""

    @abstractmethod
    def outline(self, samples: int = 64) -> list[np.ndarray]:
        """Polylignes du contour (pour les données de tracé)."""

    @abstractmethod
    def describe(self) -> str:
        """Descripteur textuel canonique."""

    def arc_length(self) -> float:
        """Longueur (régions de dimension 1 de longueur finie)."""
        return 0.0


@dataclass(frozen=True)
class PointOrigin(Region):
    """Point réduit à l'origine."""

    @property
    def dimension(self) -> int:
        return 0

    def area(self) -> float:
        return 0.0

    def contains_many(self, q, p):
        q, p = np.asarray(q, dtype=float), np.asarray(p, dtype=float)
        return (np.abs(q) <= _MEASURE_ZERO_TOL) & (np.abs(p) <= _MEASURE_ZERO_TOL)

    def nodes(self, spec):
        raise RegionError("Le point n'a pas de nœuds de quadrature (forme fermée Π)")

    def outline(self, samples=64):
        return [np.zeros((1, 2))]

    def describe(self):
        return "point"


@dataclass(frozen=True)
class Segment(Region):
    """
    Segment de longueur ``length`` porté par la droite Q_θ = 0 passant par ``center``.

    Direction (−sin θ, cos θ).
    """
    length: float
    theta: float = 0.0
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.length > 0:
            raise RegionError(f"Longueur de segment invalide: {self.length}")

    @property
    def dimension(self) -> int:
        return 1

    @property
    def direction(self) -> np.ndarray:
        return np.array([-np.sin(self.theta), np.cos(self.theta)])

    def area(self):
        return 0.0

    def arc_length(self) -> float:
        return float(self.length)

    def contains_many(self, q, p):
        dq = np.asarray(q, dtype=float) - self.center[0]
        dp = np.asarray(p, dtype=float) - self.center[1]
        along = dq * self.direction[0] + dp * self.direction[1]
        across = dq * np.cos(self.theta) + dp * np.sin(self.theta)
        half = 0.5 * self.length
        return (np.abs(across) <= _MEASURE_ZERO_TOL) & (np.abs(along) <= half + _MEASURE_ZERO_TOL)

    def nodes(self, spec):
        half = 0.5 * self.length
        s, w = gauss_legendre(spec.order, -half, half)
        points = np.asarray(self.center)[None, :] + s[:, None] * self.direction[None, :]
        return NodeSet(points, w)

    def outline(self, samples=64):
        half = 0.5 * self.length
        c = np.asarray(self.center)
        return [np.stack([c - half * self.direction, c + half * self.direction])]

    def describe(self):
        body = f"seg({format_number(self.length)},{format_number(self.theta)})"
        if self.center != (0.0, 0.0):
            cq, cp = self.center
            return f"disp({format_number(cq)},{format_number(cp)},{body})"
        return body


@dataclass(frozen=True)
class Line(Region):
    """Droite Q_θ = offset, soit q cos θ + p sin θ = offset."""
    theta: float = 0.0
    offset: float = 0.0

    @property
    def dimension(self) -> int:
        return 1

    def area(self):
        return 0.0

    def contains_many(self, q, p):
        value = np.asarray(q, dtype=float) * np.cos(self.theta) \
            + np.asarray(p, dtype=float) * np.sin(self.theta)
        return np.abs(value - self.offset) <= _MEASURE_ZERO_TOL

    def nodes(self, spec):
        raise RegionError("Droite d'étendue infinie : pas de quadrature (projecteur fermé)")

    def outline(self, samples=64):
        normal = np.array([np.cos(self.theta), np.sin(self.theta)])
        tangent = np.array([-normal[1], normal[0]])
        base = self.offset * normal
        return [np.stack([base - 6.0 * tangent, base + 6.0 * tangent])]

    def describe(self):
        return f"line({format_number(self.theta)},{format_number(self.offset)})"


@dataclass(frozen=True)
class Rectangle(Region):
    """Rectangle [x0, x0 + width] × [k0, k0 + height]."""
    x0: float
    k0: float
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise RegionError(f"Côtés de rectangle invalides: {self.width}, {self.height}")

    def area(self):
        return float(self.width * self.height)

    def contains_many(self, q, p):
        q, p = np.asarray(q, dtype=float), np.asarray(p, dtype=float)
        return ((q >= self.x0) & (q <= self.x0 + self.width)
                & (p >= self.k0) & (p <= self.k0 + self.height))

    def nodes(self, spec):
        qs, wq = gauss_legendre(spec.order, self.x0, self.x0 + self.width)
        ps, wp = gauss_legendre(spec.order, self.k0, self.k0 + self.height)
        qq, pp = np.meshgrid(qs, ps, indexing="ij")
        points = np.stack([qq, pp], axis=-1).reshape(-1, 2)
        return NodeSet(points, np.outer(wq, wp).ravel())

    def outline(self, samples=64):
        x1, k1 = self.x0 + self.width, self.k0 + self.height
        return [np.array([[self.x0, self.k0], [x1, self.k0], [x1, k1],
                          [self.x0, k1], [self.x0, self.k0]])]

    def describe(self):
        values = (self.x0, self.k0, self.width, self.height)
        return "rect(" + ",".join(format_number(v) for v in values) + ")"


@dataclass(frozen=True)
class Disk(Region):
    """Disque de centre ``center`` et de diamètre ``diameter``."""
    center: tuple[float, float]
    diameter: float

    def __post_init__(self):
        if not self.diameter > 0:
            raise RegionError(f"Diamètre invalide: {self.diameter}")

    @property
    def radius(self) -> float:
        return 0.5 * self.diameter

    def area(self):
        return float(np.pi * self.radius ** 2)

    def contains_many(self, q, p):
        dq = np.asarray(q, dtype=float) - self.center[0]
        dp = np.asarray(p, dtype=float) - self.center[1]
        return dq * dq + dp * dp <= self.radius ** 2

    def nodes(self, spec):
        return disk_nodes(self.center, self.radius, spec.order)

    def outline(self, samples=64):
        phi = np.linspace(0.0, 2.0 * np.pi, samples + 1)
        return [np.stack([self.center[0] + self.radius * np.cos(phi),
                          self.center[1] + self.radius * np.sin(phi)], axis=1)]

    def describe(self):
        cq, cp = self.center
        return f"disk({format_number(cq)},{format_number(cp)},{format_number(self.diameter)})"


@dataclass(frozen=True)
class IsoTriangle(Region):
    """
    Triangle isocèle de sommet l'origine, d'apothème ``apothem`` et d'angle au
    sommet 2π/sides ; ``orientation`` est la direction de l'apothème.
    """
    apothem: float
    sides: int
    orientation: float = 0.0

    def __post_init__(self):
        if not self.apothem > 0:
            raise RegionError(f"Apothème invalide: {self.apothem}")
        if int(self.sides) != self.sides or self.sides < 3:
            raise RegionError(f"Nombre de côtés invalide: {self.sides} (minimum 3)")

    @property
    def apex_angle(self) -> float:
        return 2.0 * np.pi / self.sides

    def vertices(self) -> np.ndarray:
        axis = np.array([np.cos(self.orientation), np.sin(self.orientation)])
        normal = np.array([-axis[1], axis[0]])
        half_base = self.apothem * np.tan(np.pi / self.sides)
        return np.array([
            [0.0, 0.0],
            self.apothem * axis - half_base * normal,
            self.apothem * axis + half_base * normal,
        ])

    def area(self):
        return float(self.apothem ** 2 * np.tan(np.pi / self.sides))

    def contains_many(self, q, p):
        q, p = np.asarray(q, dtype=float), np.asarray(p, dtype=float)
        along = q * np.cos(self.orientation) + p * np.sin(self.orientation)
        across = -q * np.sin(self.orientation) + p * np.cos(self.orientation)
        slope = np.tan(np.pi / self.sides)
        return (along >= 0.0) & (along <= self.apothem) & (np.abs(across) <= along * slope)

    def nodes(self, spec):
        a, b, c = self.vertices()
        return triangle_nodes(a, b, c, spec.order)

    def outline(self, samples=64):
        v = self.vertices()
        return [np.vstack([v, v[:1]])]

    def describe(self):
        body = f"tri({format_number(self.apothem)},{int(self.sides)})"
        if self.orientation:
            return f"rot({format_number(self.orientation)},{body})"
        return body


@dataclass(frozen=True)
class CanonicalPolygon(Region):
    """Polygone régulier à ``sides`` côtés d'apothème ``apothem`` (apothème sur l'axe q)."""
    apothem: float
    sides: int

    def __post_init__(self):
        if not self.apothem > 0:
            raise RegionError(f"Apothème invalide: {self.apothem}")
        if int(self.sides) != self.sides or self.sides < 3:
            raise RegionError(f"Nombre de côtés invalide: {self.sides} (minimum 3)")

    def triangles(self) -> list[IsoTriangle]:
        """Les triangles isocèles dont la réunion forme le polygone."""
        return [IsoTriangle(self.apothem, self.sides, 2.0 * np.pi * j / self.sides)
                for j in range(self.sides)]

    def area(self):
        return float(self.sides * self.apothem ** 2 * np.tan(np.pi / self.sides))

    def contains_many(self, q, p):
        q, p = np.asarray(q, dtype=float), np.asarray(p, dtype=float)
        inside = np.ones(np.broadcast(q, p).shape, dtype=bool)
        for j in range(self.sides):
            angle = 2.0 * np.pi * j / self.sides
            inside &= q * np.cos(angle) + p * np.sin(angle) <= self.apothem
        return inside

    def nodes(self, spec):
        return NodeSet.concatenate([t.nodes(spec) for t in self.triangles()])

    def outline(self, samples=64):
        radius = self.apothem / np.cos(np.pi / self.sides)
        angles = (2.0 * np.arange(self.sides + 1) + 1.0) * np.pi / self.sides
        return [np.stack([radius * np.cos(angles), radius * np.sin(angles)], axis=1)]

    def describe(self):
        return f"poly({format_number(self.apothem)},{int(self.sides)})"


@dataclass(frozen=True)
class DiskCluster(Region):
    """
    Grappe carrée de (m+1)² disques de diamètre ``spacing`` centrés en
    (c + i·spacing, c + j·spacing), 0 ≤ i, j ≤ m.
    """
    c: float
    spacing: float
    m: int = 0

    def __post_init__(self):
        if not self.spacing > 0:
            raise RegionError(f"Diamètre de grappe invalide: {self.spacing}")
        if int(self.m) != self.m or self.m < 0:
            raise RegionError(f"Taille de grappe invalide: {self.m}")

    @property
    def side(self) -> int:
        """Nombre de disques par côté."""
        return int(self.m) + 1

    def disks(self) -> list[Disk]:
        return [Disk((self.c + i * self.spacing, self.c + j * self.spacing), self.spacing)
                for i in range(self.side) for j in range(self.side)]

    def area(self):
        return float(self.side ** 2 * np.pi * self.spacing ** 2 / 4.0)

    def contains_many(self, q, p):
        result = np.zeros(np.broadcast(np.asarray(q), np.asarray(p)).shape, dtype=bool)
        for disk in self.disks():
            result |= disk.contains_many(q, p)
        return result

    def nodes(self, spec):
        return NodeSet.concatenate([d.nodes(spec) for d in self.disks()])

    def outline(self, samples=64):
        return [loop for d in self.disks() for loop in d.outline(samples)]

    def describe(self):
        return "union(" + ",".join(d.describe() for d in self.disks()) + ")"


@dataclass(frozen=True)
class Rotated(Region):
    """Image de ``inner`` par la rotation d'angle ``angle`` autour de l'origine."""
    angle: float
    inner: Region

    @property
    def dimension(self) -> int:
        return self.inner.dimension

    def area(self):
        return self.inner.area()

    def arc_length(self):
        return self.inner.arc_length()

    def contains_many(self, q, p):
        q, p = np.asarray(q, dtype=float), np.asarray(p, dtype=float)
        c, s = np.cos(self.angle), np.sin(self.angle)
        return self.inner.contains_many(c * q + s * p, -s * q + c * p)

    def nodes(self, spec):
        return self.inner.nodes(spec).mapped(rotation_matrix(self.angle))

    def outline(self, samples=64):
        m = rotation_matrix(self.angle)
        return [loop @ m.T for loop in self.inner.outline(samples)]

    def describe(self):
        return f"rot({format_number(self.angle)},{self.inner.describe()})"


@dataclass(frozen=True)
class ReflectedOrigin(Region):
    """Image de ``inner`` par la réflexion (q, p) ↦ (−q, −p)."""
    inner: Region

    @property
    def dimension(self) -> int:
        return self.inner.dimension

    def area(self):
        return self.inner.area()

    def arc_length(self):
        return self.inner.arc_length()

    def contains_many(self, q, p):
        return self.inner.contains_many(-np.asarray(q, dtype=float), -np.asarray(p, dtype=float))

    def nodes(self, spec):
        return self.inner.nodes(spec).mapped(-np.eye(2))

    def outline(self, samples=64):
        return [-loop for loop in self.inner.outline(samples)]

    def describe(self):
        return f"refl({self.inner.describe()})"


@dataclass(frozen=True)
class Displaced(Region):
    """Image de ``inner`` par la translation (s, t)."""
    shift: tuple[float, float]
    inner: Region

    @property
    def dimension(self) -> int:
        return self.inner.dimension

    def area(self):
        return self.inner.area()

    def arc_length(self):
        return self.inner.arc_length()

    def contains_many(self, q, p):
        return self.inner.contains_many(np.asarray(q, dtype=float) - self.shift[0],
                                        np.asarray(p, dtype=float) - self.shift[1])

    def nodes(self, spec):
        return self.inner.nodes(spec).mapped(np.eye(2), self.shift)

    def outline(self, samples=64):
        return [loop + np.asarray(self.shift)[None, :] for loop in self.inner.outline(samples)]

    def describe(self):
        s, t = self.shift
        return f"disp({format_number(s)},{format_number(t)},{self.inner.describe()})"


@dataclass(frozen=True)
class Union(Region):
    """Réunion de régions ; ``disjoint`` déclare des intersections d'aire nulle."""
    members: tuple[Region, ...]
    disjoint: bool = True

    def __post_init__(self):
        if not self.members:
            raise RegionError("Réunion vide")
        object.__setattr__(self, "members", tuple(self.members))
        if self.disjoint:
            _check_disjoint(self.members)

    @property
    def dimension(self) -> int:
        return max(m.dimension for m in self.members)

    def area(self):
        if not self.disjoint:
            raise RegionError("Réunion non déclarée disjointe : aire non prise en charge")
        return float(sum(m.area() for m in self.members))

    def arc_length(self):
        return float(sum(m.arc_length() for m in self.members))

    def contains_many(self, q, p):
        result = np.zeros(np.broadcast(np.asarray(q), np.asarray(p)).shape, dtype=bool)
        for member in self.members:
            result |= member.contains_many(q, p)
        return result

    def nodes(self, spec):
        if not self.disjoint:
            raise RegionError("Réunion non déclarée disjointe : quadrature refusée")
        return NodeSet.concatenate([m.nodes(spec) for m in self.members])

    def outline(self, samples=64):
        return [loop for m in self.members for loop in m.outline(samples)]

    def describe(self):
        return "union(" + ",".join(m.describe() for m in self.members) + ")"


def _bounding_box(region: Region) -> tuple[np.ndarray, np.ndarray]:
    corners = np.vstack(region.outline(128))
    return corners.min(axis=0), corners.max(axis=0)


def shared_area(first: Region, second: Region, samples: int = _OVERLAP_SAMPLES,
                seed: int = 0) -> float:
    """
    Aire de l'intersection de deux régions de dimension 2.

    Exacte pour deux rectangles, estimée par Monte Carlo dans l'intersection
    des boîtes englobantes sinon. Les bords communs sont d'aire nulle.
    """
    if isinstance(first, Rectangle) and isinstance(second, Rectangle):
        width = (min(first.x0 + first.width, second.x0 + second.width)
                 - max(first.x0, second.x0))
        height = (min(first.k0 + first.height, second.k0 + second.height)
                  - max(first.k0, second.k0))
        return float(max(width, 0.0) * max(height, 0.0))
    if isinstance(first, Disk) and isinstance(second, Disk):
        gap = float(np.hypot(first.center[0] - second.center[0],
                             first.center[1] - second.center[1]))
        r1, r2 = first.radius, second.radius
        if gap >= r1 + r2:
            return 0.0
        if gap <= abs(r1 - r2):
            return float(np.pi * min(r1, r2) ** 2)
        a1 = np.arccos((gap ** 2 + r1 ** 2 - r2 ** 2) / (2.0 * gap * r1))
        a2 = np.arccos((gap ** 2 + r2 ** 2 - r1 ** 2) / (2.0 * gap * r2))
        kite = 0.5 * np.sqrt(max((-gap + r1 + r2) * (gap + r1 - r2)
                                 * (gap - r1 + r2) * (gap + r1 + r2), 0.0))
        return float(r1 ** 2 * a1 + r2 ** 2 * a2 - kite)
    low_a, high_a = _bounding_box(first)
    low_b, high_b = _bounding_box(second)
    low, high = np.maximum(low_a, low_b), np.minimum(high_a, high_b)
    if np.any(high - low <= 0.0):
        return 0.0
    points = np.random.default_rng(seed).uniform(low, high, size=(samples, 2))
    both = (first.contains_many(points[:, 0], points[:, 1])
            & second.contains_many(points[:, 0], points[:, 1]))
    return float(np.count_nonzero(both) / samples * np.prod(high - low))


def _check_disjoint(members: tuple[Region, ...]) -> None:
    """Refuse deux membres de dimension 2 dont l'intersection a une aire non nulle."""
    solids = [m for m in members if m.dimension == 2]
    for i, first in enumerate(solids):
        for second in solids[i + 1:]:
            common = shared_area(first, second)
            if common > _OVERLAP_TOL * min(first.area(), second.area()):
                raise RegionError(
                    f"Réunion disjointe invalide: {first.describe()} et {second.describe()} "
                    f"partagent une aire de {common:.4g}"
                )


def region_area(region: Region) -> float:
    """Aire exacte d'une région (0 pour les régions de dimension 0 ou 1)."""
    return region.area()


def segment_length(region: Region) -> float:
    """Longueur totale des parties de dimension 1 de longueur finie."""
    return region.arc_length()


def region_contains(region: Region, point: tuple[float, float]) -> bool:
    """Appartenance d'un point, bord compris."""
    q, p = point
    return bool(region.contains_many(np.array([q]), np.array([p]))[0])


def quadrature_nodes(region: Region, spec: QuadratureSpec | None = None) -> NodeSet:
    """
    Nœuds et poids de quadrature de la région.

    La somme des poids vaut l'aire (ou la longueur pour un segment).

    Raises:
        RegionError: pour une droite ou un point (formes fermées dédiées)
    """
    nodes = region.nodes(spec or QuadratureSpec())
    logger.debug("%d nœuds de quadrature pour %s", len(nodes), region.describe())
    return nodes


def region_outline(region: Region, samples: int = 64) -> list[np.ndarray]:
    """Contours de la région sous forme de polylignes."""
    return region.outline(samples)


def describe_region(region: Region) -> str:
    """Descripteur textuel de la région."""
    return region.describe()


def overlap_fraction(union: Union, samples: int = 200_000, seed: int = 0) -> float:
    """
    Estimation Monte Carlo de l'aire couverte plusieurs fois, relative à l'aire couverte.

    Args:
        union: Réunion à examiner (régions de dimension 2)
        samples: Nombre de tirages uniformes dans la boîte englobante
        seed: Graine du générateur

    Returns:
        float: fraction des points couverts par au moins deux membres
    """
    corners = np.vstack([loop for loop in union.outline(128)])
    low, high = corners.min(axis=0), corners.max(axis=0)
    rng = np.random.default_rng(seed)
    points = rng.uniform(low, high, size=(samples, 2))
    counts = np.zeros(samples, dtype=int)
    for member in union.members:
        counts += member.contains_many(points[:, 0], points[:, 1]).astype(int)
    covered = np.count_nonzero(counts >= 1)
    if covered == 0:
        return 0.0
    return float(np.count_nonzero(counts >= 2) / covered)
