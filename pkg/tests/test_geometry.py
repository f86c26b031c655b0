"""Tests pour l'algèbre des régions."""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from src.core.errors import RegionError
from src.core.geometry import (
    CanonicalPolygon,
    Disk,
    DiskCluster,
    Displaced,
    IsoTriangle,
    Line,
    PointOrigin,
    QuadratureSpec,
    Rectangle,
    ReflectedOrigin,
    Rotated,
    Segment,
    Union,
    describe_region,
    gauss_legendre,
    overlap_fraction,
    quadrature_nodes,
    region_area,
    region_contains,
    region_outline,
    segment_length,
    shared_area,
)


class TestAreas:
    """Tests des aires exactes."""

    def test_rectangle(self):
        """Aire largeur × hauteur."""
        assert region_area(Rectangle(0.0, 0.0, 2.0, 0.5)) == 1.0

    def test_disk(self):
        """Aire π r² à partir du diamètre."""
        assert region_area(Disk((1.0, -1.0), 2.0)) == pytest.approx(np.pi)

    def test_hexagon(self):
        """Hexagone d'apothème √3/2 : aire 3√3/2."""
        hexagon = CanonicalPolygon(np.sqrt(3.0) / 2.0, 6)
        assert region_area(hexagon) == pytest.approx(1.5 * np.sqrt(3.0))

    def test_triangle_is_polygon_share(self):
        """Le triangle isocèle vaut 1/M du polygone."""
        polygon = CanonicalPolygon(1.2, 5)
        assert region_area(IsoTriangle(1.2, 5)) == pytest.approx(polygon.area() / 5)

    def test_cluster(self):
        """(m+1)² disques de diamètre d."""
        cluster = DiskCluster(0.0, 1.0, 1)
        assert len(cluster.disks()) == 4
        assert region_area(cluster) == pytest.approx(np.pi)

    def test_measure_zero_regions(self):
        """Point, segment et droite sont d'aire nulle."""
        assert region_area(PointOrigin()) == 0.0
        assert region_area(Segment(1.0)) == 0.0
        assert region_area(Line(0.3, 1.0)) == 0.0

    def test_transforms_preserve_area(self):
        """Rotation, réflexion et translation conservent l'aire."""
        rect = Rectangle(0.0, 0.0, 1.0, 3.0)
        for region in (Rotated(0.7, rect), ReflectedOrigin(rect), Displaced((2.0, 1.0), rect)):
            assert region_area(region) == pytest.approx(3.0)

    def test_non_disjoint_union(self):
        """L'aire d'une réunion non déclarée disjointe est refusée."""
        union = Union((Rectangle(0, 0, 1, 1), Rectangle(0.5, 0, 1, 1)), disjoint=False)
        with pytest.raises(RegionError, match="disjointe"):
            union.area()

    def test_segment_lengths(self):
        """Longueur cumulée des segments d'une réunion."""
        union = Union((Segment(1.0), Rotated(0.3, Segment(2.0, 0.5))))
        assert segment_length(union) == pytest.approx(3.0)


class TestValidation:
    """Tests des paramètres invalides."""

    @pytest.mark.parametrize("factory", [
        lambda: Rectangle(0.0, 0.0, 0.0, 1.0),
        lambda: Disk((0.0, 0.0), -1.0),
        lambda: IsoTriangle(1.0, 2),
        lambda: CanonicalPolygon(0.0, 6),
        lambda: Segment(0.0),
        lambda: DiskCluster(0.0, 1.0, -1),
        lambda: Union(()),
        lambda: QuadratureSpec(order=3),
        lambda: QuadratureSpec(order=16, max_order=8),
    ])
    def test_invalid_parameters(self, factory):
        """Chaque constructeur refuse ses paramètres invalides."""
        with pytest.raises(RegionError):
            factory()


class TestContains:
    """Tests d'appartenance."""

    def test_rectangle_boundary_included(self):
        """Le bord du rectangle est inclus."""
        rect = Rectangle(0.0, 0.0, 1.0, 1.0)
        assert region_contains(rect, (1.0, 0.5))
        assert not region_contains(rect, (1.01, 0.5))

    def test_rotated(self):
        """La rotation de π/2 envoie (0.5, 0.5) sur (−0.5, 0.5)."""
        region = Rotated(np.pi / 2, Rectangle(0.0, 0.0, 1.0, 1.0))
        assert region_contains(region, (-0.5, 0.5))
        assert not region_contains(region, (0.5, 0.5))

    def test_reflected_and_displaced(self):
        """Réflexion par l'origine et translation."""
        rect = Rectangle(0.0, 0.0, 1.0, 1.0)
        assert region_contains(ReflectedOrigin(rect), (-0.5, -0.5))
        assert region_contains(Displaced((3.0, 0.0), rect), (3.5, 0.5))

    def test_segment_and_line(self):
        """Segment et droite sont des ensembles de mesure nulle."""
        assert region_contains(Segment(2.0, 0.0), (0.0, 0.9))
        assert not region_contains(Segment(2.0, 0.0), (0.1, 0.0))
        assert region_contains(Line(np.pi / 2, 1.0), (5.0, 1.0))

    def test_polygon(self):
        """Le centre est dans le polygone, un sommet éloigné non."""
        hexagon = CanonicalPolygon(1.0, 6)
        assert region_contains(hexagon, (0.0, 0.0))
        assert not region_contains(hexagon, (1.5, 0.0))

    def test_point(self):
        """Le point ne contient que l'origine."""
        assert region_contains(PointOrigin(), (0.0, 0.0))
        assert not region_contains(PointOrigin(), (0.0, 1e-6))

    @settings(max_examples=50)
    @given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 2 * np.pi))
    def test_rotation_moves_membership(self, q, p, angle):
        """x ∈ S si et seulement si R(φ)x ∈ R(φ)S."""
        disk = Disk((1.0, 0.0), 1.0)
        assume(abs(np.hypot(q - 1.0, p) - 0.5) > 1e-6)
        c, s = np.cos(angle), np.sin(angle)
        moved = (c * q - s * p, s * q + c * p)
        assert region_contains(Rotated(angle, disk), moved) == region_contains(disk, (q, p))


class TestQuadrature:
    """Tests des nœuds de quadrature."""

    def test_gauss_legendre_integrates_polynomials(self):
        """Gauss-Legendre intègre x³ exactement."""
        x, w = gauss_legendre(8, 0.0, 2.0)
        assert np.sum(w * x ** 3) == pytest.approx(4.0)

    @pytest.mark.parametrize("region", [
        Rectangle(-1.0, 0.5, 2.0, 1.5),
        Disk((0.3, 0.0), 1.4),
        IsoTriangle(0.8, 5, 0.3),
        CanonicalPolygon(0.9, 7),
        DiskCluster(0.5, 1.0, 1),
        Rotated(0.4, ReflectedOrigin(Displaced((1.0, 2.0), Rectangle(0.0, 0.0, 1.0, 1.0)))),
    ])
    def test_weights_sum_to_area(self, region):
        """La somme des poids vaut l'aire."""
        nodes = quadrature_nodes(region, QuadratureSpec(order=16))
        assert nodes.weights.sum() == pytest.approx(region.area(), rel=1e-12)

    def test_nodes_inside(self):
        """Les nœuds d'un triangle tourné sont dans le triangle."""
        region = Rotated(1.1, IsoTriangle(1.0, 6))
        nodes = quadrature_nodes(region, QuadratureSpec(order=8))
        assert np.all(region.contains_many(nodes.points[:, 0], nodes.points[:, 1]))

    def test_segment_weights_sum_to_length(self):
        """Sur un segment la somme des poids vaut la longueur."""
        nodes = quadrature_nodes(Segment(1.5, 0.2, (1.0, 1.0)), QuadratureSpec(order=8))
        assert nodes.weights.sum() == pytest.approx(1.5)
        assert_allclose(nodes.points.mean(axis=0), [1.0, 1.0], atol=1e-12)

    @pytest.mark.parametrize("region", [PointOrigin(), Line(0.0, 0.0)])
    def test_no_nodes_for_closed_forms(self, region):
        """Le point et la droite n'ont pas de quadrature."""
        with pytest.raises(RegionError):
            quadrature_nodes(region)

    def test_non_disjoint_union_refused(self):
        """Une réunion non disjointe n'a pas de quadrature."""
        union = Union((Disk((0, 0), 1.0),), disjoint=False)
        with pytest.raises(RegionError):
            quadrature_nodes(union)


class TestDescriptions:
    """Tests des descripteurs et contours."""

    def test_describe_nested(self):
        """Descripteur canonique d'une région composée."""
        region = Rotated(0.5, Displaced((1.0, -2.0), Rectangle(0.0, 0.0, 1.0, 1.0)))
        assert describe_region(region) == "rot(0.5,disp(1.0,-2.0,rect(0.0,0.0,1.0,1.0)))"

    def test_oriented_triangle(self):
        """Un triangle orienté se décrit par une rotation."""
        assert IsoTriangle(1.0, 6, 0.25).describe() == "rot(0.25,tri(1.0,6))"

    def test_outline_closed(self):
        """Le contour du rectangle est une boucle fermée."""
        (loop,) = region_outline(Rectangle(0.0, 0.0, 1.0, 2.0))
        assert_allclose(loop[0], loop[-1])

    def test_cluster_outline_per_disk(self):
        """Une boucle de contour par disque de la grappe."""
        assert len(region_outline(DiskCluster(0.0, 1.0, 2), samples=16)) == 9


class TestOverlap:
    """Tests de l'estimation de recouvrement."""

    def test_disjoint_union(self):
        """Deux rectangles voisins ne se recouvrent pas."""
        union = Union((Rectangle(0, 0, 1, 1), Rectangle(1, 0, 1, 1)))
        assert overlap_fraction(union, samples=20_000) < 1e-3

    def test_identical_members(self):
        """Deux membres identiques se recouvrent entièrement."""
        rect = Rectangle(0, 0, 1, 1)
        assert overlap_fraction(Union((rect, rect), disjoint=False), samples=20_000) == 1.0


class TestDisjointUnion:
    """Tests du refus des réunions qui se recouvrent."""

    @pytest.mark.parametrize("members", [
        (Rectangle(0, 0, 1, 1), Rectangle(0, 0, 1, 1)),
        (Rectangle(0, 0, 1, 1), Rectangle(0.5, 0.5, 1, 1)),
        (Disk((0.0, 0.0), 2.0), Disk((1.0, 0.0), 2.0)),
        (Rectangle(0, 0, 1, 1), Displaced((0.5, 0.0), Rectangle(0, 0, 1, 1))),
        (Rectangle(0, 0, 1, 1), Union((Disk((0.5, 0.5), 0.5),))),
    ])
    def test_overlap_is_rejected(self, members):
        """Deux membres d'aire commune non nulle sont refusés."""
        with pytest.raises(RegionError, match="partagent"):
            Union(members)

    @pytest.mark.parametrize("members", [
        (Rectangle(0, 0, 1, 1), Rectangle(1, 0, 1, 1)),
        (Disk((0.0, 0.0), 1.0), Disk((1.0, 0.0), 1.0)),
        (IsoTriangle(0.866, 6), Rotated(np.pi / 3.0, IsoTriangle(0.866, 6))),
        (Rectangle(0, 0, 1, 1), Rectangle(2, 2, 1, 1)),
        (Rectangle(0, 0, 1, 1), Segment(4.0)),
    ])
    def test_shared_boundaries_are_accepted(self, members):
        """Bords communs et membres de mesure nulle sont admis."""
        assert Union(members).disjoint

    def test_declared_overlap_is_kept(self):
        """Sans déclaration de disjonction, le recouvrement est conservé."""
        rect = Rectangle(0, 0, 1, 1)
        assert not Union((rect, rect), disjoint=False).disjoint

    def test_exact_shared_areas(self):
        """Aires communes exactes de deux rectangles et de deux disques."""
        assert shared_area(Rectangle(0, 0, 2, 2), Rectangle(1, 1, 2, 2)) == 1.0
        lens = shared_area(Disk((0.0, 0.0), 2.0), Disk((1.0, 0.0), 2.0))
        assert lens == pytest.approx(2.0 * np.pi / 3.0 - np.sqrt(3.0) / 2.0)
        assert shared_area(Disk((0.0, 0.0), 4.0), Disk((0.5, 0.0), 1.0)) == pytest.approx(
            np.pi / 4.0)

    def test_estimated_shared_area(self):
        """L'estimation Monte Carlo retrouve un quart de carré."""
        common = shared_area(Rotated(0.0, Rectangle(0, 0, 1, 1)), Rectangle(0.5, 0.5, 1, 1))
        assert common == pytest.approx(0.25, abs=0.02)
