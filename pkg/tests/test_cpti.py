"""Tests pour les applications CPTI, leurs dilatations et le pavage."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from src.core.cpti import (
    KrausMap,
    MapKind,
    TilingMode,
    apply_kraus_map,
    compose_maps,
    diagonal_transfer,
    dilated_apply,
    dilated_dual_apply,
    dilation_gram_defect,
    dilation_unitary,
    dual_apply,
    fourier_dilation,
    hexagon_map,
    local_unitary_dilation,
    make_map,
    polygon_dilation,
    step_matrix,
    tile_run,
)
from src.core.errors import (
    DimensionMismatchError,
    MapParameterError,
    NotHermitianError,
    NumericalPreconditionError,
    RegionError,
    UnknownMapKindError,
)
from src.core.fock import FockOperator, TruncationConfig, block_distance, hermitian_spectrum
from src.core.geometry import (
    CanonicalPolygon,
    Disk,
    DiskCluster,
    QuadratureSpec,
    Rectangle,
)
from src.core.region_ops import build_region_operator, disk_operator


def random_state(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    rho = rho / np.trace(rho).real
    return FockOperator(0.5 * (rho + rho.conj().T), hermitian_hint=True, label="rho")


def random_observable(rng, dim):
    b = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return FockOperator(0.5 * (b + b.conj().T), hermitian_hint=True, label="X")


ALL_MAPS = [
    (MapKind.ROTATION, {"phi": 0.7}),
    (MapKind.REFLECTION, None),
    (MapKind.POLYGON, {"sides": 5}),
    (MapKind.DISPLACEMENT, {"q": 0.4, "p": -0.3}),
    (MapKind.WEST, {"q": 0.5}),
    (MapKind.NORTH, {"p": 0.5}),
    (MapKind.TILE_STEP, {"mu": 0.5, "nu": 0.5}),
    (MapKind.FAN, {"phi": np.pi / 3}),
    (MapKind.BUNDLE, {"offsets": (-1.0, 0.0, 1.0)}),
]


class TestMakeMap:
    """Tests de la construction des familles d'applications."""

    @pytest.mark.parametrize("kind,params,count", [
        (MapKind.ROTATION, {"phi": 0.3}, 2),
        (MapKind.REFLECTION, None, 2),
        (MapKind.POLYGON, {"sides": 6}, 6),
        ("tile-step", {"mu": 1.0, "nu": 1.0}, 4),
        ("fan", {"phi": 0.5}, 3),
        ("bundle", {"offsets": [0.0, 1.0]}, 2),
    ])
    def test_generator_counts(self, kind, params, count):
        """Nombre de générateurs de chaque famille."""
        assert len(make_map(kind, params, TruncationConfig(24, effective_dim=2))) == count

    def test_unknown_kind(self):
        """Une famille inconnue est refusée."""
        with pytest.raises(UnknownMapKindError):
            make_map("shear", {}, TruncationConfig(4))

    def test_composed_needs_compose_maps(self):
        """Une application composée ne se construit pas par make_map."""
        with pytest.raises(UnknownMapKindError):
            make_map(MapKind.COMPOSED, {}, TruncationConfig(4))

    def test_missing_parameter(self):
        """Un paramètre manquant est signalé par son nom."""
        with pytest.raises(MapParameterError, match="phi"):
            make_map(MapKind.ROTATION, {}, TruncationConfig(4))

    @pytest.mark.parametrize("sides", [None, 2, 4.5])
    def test_invalid_sides(self, sides):
        """Le polygone exige un entier au moins égal à 3."""
        with pytest.raises(MapParameterError):
            make_map(MapKind.POLYGON, {"sides": sides}, TruncationConfig(4))

    def test_non_finite_parameter(self):
        """Un paramètre non fini est refusé."""
        with pytest.raises(MapParameterError):
            make_map(MapKind.WEST, {"q": float("nan")}, TruncationConfig(4))

    def test_displacement_beyond_cutoff(self):
        """Un déplacement que la coupure ne représente pas est refusé."""
        with pytest.raises(MapParameterError, match="non unitaire"):
            make_map(MapKind.DISPLACEMENT, {"q": 5.0, "p": 5.0}, TruncationConfig(8))

    def test_tiling_step_needs_room(self):
        """Le pas (1, 1) passe avec un petit bloc effectif, pas avec le bloc par défaut."""
        with pytest.raises(MapParameterError):
            make_map(MapKind.TILE_STEP, {"mu": 1.0, "nu": 1.0}, TruncationConfig(16))
        kraus = make_map(MapKind.TILE_STEP, {"mu": 1.0, "nu": 1.0},
                         TruncationConfig(16, effective_dim=2))
        assert len(kraus) == 4

    def test_tile_step_phase(self):
        """Le quatrième générateur est D(0,ν)D(μ,0)."""
        cfg = TruncationConfig(40, effective_dim=10)
        kraus = make_map(MapKind.TILE_STEP, {"mu": 0.4, "nu": 0.3}, cfg)
        product = kraus.generators[2] @ kraus.generators[1]
        assert np.max(np.abs((product - kraus.generators[3])[:10, :10])) < 1e-10

    def test_generators_frozen(self):
        """Les générateurs sont en lecture seule."""
        kraus = make_map(MapKind.REFLECTION, None, TruncationConfig(4))
        with pytest.raises(ValueError):
            kraus.generators[0][0, 0] = 2.0

    def test_mismatched_generators(self):
        """Des générateurs de formes différentes sont refusés."""
        with pytest.raises(DimensionMismatchError):
            KrausMap((np.eye(2), np.eye(3)), MapKind.COMPOSED)


class TestComposition:
    """Tests de la composition."""

    def test_outer_index_slowest(self):
        """G_{(o,i)} = G_o·G_i, l'indice extérieur variant le plus lentement."""
        cfg = TruncationConfig(6)
        outer = make_map(MapKind.REFLECTION, None, cfg)
        inner = make_map(MapKind.FAN, {"phi": 0.4}, cfg)
        composed = compose_maps(outer, inner)
        assert len(composed) == 6
        assert_allclose(composed.generators[4], outer.generators[1] @ inner.generators[1])
        assert composed.kind is MapKind.COMPOSED

    def test_composition_applies_in_order(self):
        """(ε₂∘ε₁)(X) = ε₂(ε₁(X))."""
        cfg = TruncationConfig(8)
        x = random_observable(np.random.default_rng(1), 8)
        outer = make_map(MapKind.WEST, {"q": 0.3}, cfg)
        inner = make_map(MapKind.ROTATION, {"phi": 0.2}, cfg)
        direct = apply_kraus_map(compose_maps(outer, inner), x).entries
        nested = apply_kraus_map(outer, apply_kraus_map(inner, x)).entries
        assert_allclose(direct, nested, atol=1e-12)

    def test_dimension_mismatch(self):
        """Des dimensions différentes sont refusées."""
        with pytest.raises(DimensionMismatchError):
            compose_maps(make_map(MapKind.REFLECTION, None, TruncationConfig(4)),
                         make_map(MapKind.REFLECTION, None, TruncationConfig(5)))

    def test_hexagon_map(self):
        """L'application hexagone compte six générateurs."""
        assert len(hexagon_map(TruncationConfig(6))) == 6


class TestDuality:
    """Tests de l'application duale."""

    @pytest.mark.parametrize("kind,params", ALL_MAPS)
    def test_trace_duality(self, kind, params):
        """Tr(ρ ε(X)) = Tr(ε*(ρ) X)."""
        cfg = TruncationConfig(24, effective_dim=2)
        kraus = make_map(kind, params, cfg)
        rng = np.random.default_rng(7)
        for _ in range(5):
            rho, x = random_state(rng, 24), random_observable(rng, 24)
            forward = np.trace(rho.entries @ apply_kraus_map(kraus, x).entries)
            backward = np.trace(dual_apply(kraus, rho).entries @ x.entries)
            assert abs(forward - backward) < 1e-10

    def test_adjoint_map(self):
        """adjoint() applique les G† : même résultat que dual_apply."""
        cfg = TruncationConfig(8)
        kraus = make_map(MapKind.DISPLACEMENT, {"q": 0.2, "p": 0.1}, cfg)
        rho = random_state(np.random.default_rng(2), 8)
        assert_allclose(apply_kraus_map(kraus.adjoint(), rho).entries,
                        dual_apply(kraus, rho).entries, atol=1e-14)

    def test_state_trace_checked(self):
        """L'état doit être de trace 1."""
        kraus = make_map(MapKind.REFLECTION, None, TruncationConfig(3))
        with pytest.raises(NumericalPreconditionError):
            dual_apply(kraus, FockOperator(np.eye(3), hermitian_hint=True))

    def test_state_hermiticity_checked(self):
        """L'état doit être hermitien."""
        kraus = make_map(MapKind.REFLECTION, None, TruncationConfig(2))
        with pytest.raises(NotHermitianError):
            dual_apply(kraus, FockOperator(np.array([[1.0, 1.0], [0.0, 0.0]])))

    def test_dimension_checked(self):
        """Opérateur et application doivent avoir la même dimension."""
        kraus = make_map(MapKind.REFLECTION, None, TruncationConfig(4))
        with pytest.raises(DimensionMismatchError):
            apply_kraus_map(kraus, FockOperator(np.eye(3)))

    def test_hermiticity_preserved(self):
        """ε(X) reste hermitien."""
        cfg = TruncationConfig(8, effective_dim=2)
        x = random_observable(np.random.default_rng(4), 8)
        out = apply_kraus_map(make_map(MapKind.TILE_STEP, {"mu": 0.5, "nu": 0.5}, cfg), x)
        assert out.hermitian_hint


class TestDilations:
    """Tests des dilatations unitaires par blocs."""

    def test_two_block_dilation(self):
        """Tr_A V(|0⟩⟨0| ⊗ X)V† = X + G X G†."""
        cfg = TruncationConfig(10, effective_dim=3)
        x = random_observable(np.random.default_rng(8), 10)
        kraus = make_map(MapKind.WEST, {"q": 0.5}, cfg)
        reduced = dilated_apply(dilation_unitary(kraus), x, 2).entries
        assert_allclose(reduced, apply_kraus_map(kraus, x).entries, atol=1e-12)

    def test_parity_dilation_gram(self):
        """V V† = 2·1 pour la parité."""
        v = dilation_unitary(make_map(MapKind.REFLECTION, None, TruncationConfig(6)))
        assert_allclose(v @ v.conj().T, 2.0 * np.eye(12), atol=1e-14)

    def test_dual_dilation(self):
        """Tr_A V†(|1⟩⟨1| ⊗ ρ)V = ρ + G†ρG."""
        cfg = TruncationConfig(8, effective_dim=2)
        rho = random_state(np.random.default_rng(9), 8)
        kraus = make_map(MapKind.NORTH, {"p": 0.4}, cfg)
        reduced = dilated_dual_apply(dilation_unitary(kraus), rho, 2, 1).entries
        assert_allclose(reduced, dual_apply(kraus, rho).entries, atol=1e-12)

    def test_dilation_requires_two_generators(self):
        """La dilatation 2×2 n'accepte que {1, G}."""
        with pytest.raises(MapParameterError):
            dilation_unitary(make_map(MapKind.FAN, {"phi": 0.3}, TruncationConfig(4)))

    def test_dilation_requires_identity_first(self):
        """Le premier générateur doit être l'identité."""
        cfg = TruncationConfig(16, effective_dim=2)
        bundle = make_map(MapKind.BUNDLE, {"offsets": (0.5, 1.0)}, cfg)
        shifted = KrausMap((bundle.generators[1], bundle.generators[0]), MapKind.BUNDLE)
        with pytest.raises(MapParameterError):
            dilation_unitary(shifted)

    @pytest.mark.parametrize("column", range(6))
    def test_polygon_dilation_columns(self, column):
        """Chaque colonne de l'ancilla reproduit l'application polygone."""
        cfg = TruncationConfig(8)
        x = random_observable(np.random.default_rng(10), 8)
        reduced = dilated_apply(polygon_dilation(6, cfg), x, 6, column).entries
        expected = apply_kraus_map(make_map(MapKind.POLYGON, {"sides": 6}, cfg), x).entries
        assert_allclose(reduced, expected, atol=1e-12)

    def test_polygon_dilation_gram(self):
        """V V† = M·1 pour l'application polygone."""
        cfg = TruncationConfig(8)
        assert dilation_gram_defect(polygon_dilation(6, cfg), 6, 6.0, cfg) < 1e-12

    def test_fourier_dilation_of_fan(self):
        """La dilatation de Fourier s'applique à toute famille."""
        cfg = TruncationConfig(6)
        kraus = make_map(MapKind.FAN, {"phi": 0.9}, cfg)
        x = random_observable(np.random.default_rng(11), 6)
        reduced = dilated_apply(fourier_dilation(kraus), x, 3, 2).entries
        assert_allclose(reduced, apply_kraus_map(kraus, x).entries, atol=1e-12)

    def test_local_unitary_freedom(self):
        """Une unitaire locale sur l'ancilla ne change pas l'application réduite."""
        cfg = TruncationConfig(6)
        x = random_observable(np.random.default_rng(12), 6)
        v = dilation_unitary(make_map(MapKind.REFLECTION, None, cfg))
        hadamard = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
        assert_allclose(dilated_apply(local_unitary_dilation(v, hadamard), x, 2).entries,
                        dilated_apply(v, x, 2).entries, atol=1e-12)

    def test_ancilla_index_range(self):
        """Un indice d'ancilla hors limites est refusé."""
        cfg = TruncationConfig(4)
        v = dilation_unitary(make_map(MapKind.REFLECTION, None, cfg))
        with pytest.raises(DimensionMismatchError):
            dilated_apply(v, FockOperator(np.eye(4)), 2, 2)


class TestStepMatrix:
    """Tests des matrices de pas."""

    @pytest.fixture
    def setup(self):
        cfg = TruncationConfig(40)
        return cfg, disk_operator(0.5, cfg).compressed(cfg)

    def test_west_step_sums(self, setup):
        """Sommes de lignes et de colonnes égales à 2 sur les indices significatifs."""
        cfg, x = setup
        kraus = make_map(MapKind.WEST, {"q": 0.5}, cfg)
        after = hermitian_spectrum(apply_kraus_map(kraus, x))
        s = step_matrix(kraus, hermitian_spectrum(x), after, cfg)
        assert s.name == "sigma"
        assert s.expected_sum == 2.0
        assert s.covers(cfg)
        assert s.row_deviation < 1e-3
        assert s.col_deviation < 1e-3
        assert np.min(s.entries) >= 0.0

    def test_update_residual(self, setup):
        """λ′ = S λ pour le pas de pavage."""
        cfg, x = setup
        kraus = make_map(MapKind.TILE_STEP, {"mu": 0.5, "nu": 0.5}, cfg)
        after = hermitian_spectrum(apply_kraus_map(kraus, x))
        s = step_matrix(kraus, hermitian_spectrum(x), after, cfg)
        assert s.name == "gamma"
        assert s.update_residual < 1e-10
        assert_allclose(s.row_sums(), s.entries.sum(axis=1))

    def test_checked_indices_cover_half_block(self, setup):
        """Au moins la moitié du bloc effectif est contrôlée pour le pas de pavage."""
        cfg, x = setup
        kraus = make_map(MapKind.TILE_STEP, {"mu": 0.5, "nu": 0.5}, cfg)
        after = hermitian_spectrum(apply_kraus_map(kraus, x))
        s = step_matrix(kraus, hermitian_spectrum(x), after, cfg)
        rows, cols = s.checked_counts
        assert rows >= cfg.effective_dim // 2
        assert cols >= cfg.effective_dim // 2
        assert s.row_deviation < 1e-3
        assert s.col_deviation < 1e-3

    def test_kernel_vectors_are_not_checked(self, caplog):
        """Les vecteurs de valeur propre nulle sont exclus des sommes."""
        cfg = TruncationConfig(12)
        diagonal = np.zeros(12)
        diagonal[:2] = (1.0, 0.5)
        x = FockOperator(np.diag(diagonal).astype(complex), hermitian_hint=True)
        kraus = make_map(MapKind.REFLECTION, None, cfg)
        with caplog.at_level("WARNING"):
            s = step_matrix(kraus, hermitian_spectrum(x),
                            hermitian_spectrum(apply_kraus_map(kraus, x)), cfg)
        assert s.checked_counts == (2, 2)
        assert not s.covers(cfg)
        assert "contrôlées seulement" in caplog.text

    def test_dimension_mismatch(self):
        """Spectres de dimensions différentes refusés."""
        cfg = TruncationConfig(4)
        kraus = make_map(MapKind.REFLECTION, None, cfg)
        with pytest.raises(DimensionMismatchError):
            step_matrix(kraus, hermitian_spectrum(np.eye(4)), hermitian_spectrum(np.eye(3)), cfg)

    def test_diagonal_transfer(self):
        """La diagonale de ε(diag(d)) s'obtient sans former ε(X)."""
        cfg = TruncationConfig(24, effective_dim=4)
        diagonal = np.linspace(1.0, -1.0, 24)
        source = FockOperator(np.diag(diagonal).astype(complex), hermitian_hint=True)
        kraus = make_map(MapKind.TILE_STEP, {"mu": 1.0, "nu": 1.0}, cfg)
        direct = np.real(np.diag(apply_kraus_map(kraus, source).entries))
        assert_allclose(diagonal_transfer(kraus, diagonal, cfg), direct, atol=1e-12)

    def test_diagonal_transfer_length(self):
        """Un vecteur de mauvaise longueur est refusé."""
        cfg = TruncationConfig(4)
        with pytest.raises(DimensionMismatchError):
            diagonal_transfer(make_map(MapKind.REFLECTION, None, cfg), np.ones(3), cfg)

    @settings(max_examples=10, deadline=None)
    @given(st.integers(min_value=3, max_value=9))
    def test_polygon_trace_property(self, sides):
        """L'application polygone multiplie la trace de tout X par M."""
        cfg = TruncationConfig(8)
        x = random_observable(np.random.default_rng(sides), 8)
        out = apply_kraus_map(make_map(MapKind.POLYGON, {"sides": sides}, cfg), x)
        assert out.trace().real == pytest.approx(sides * x.trace().real, abs=1e-10)


class TestTiling:
    """Tests du pavage ouest-nord."""

    def test_rectangle_two_steps(self):
        """Deux pas : aires 1, 4, 16 et régions doublées."""
        cfg = TruncationConfig(48, effective_dim=8)
        region = Rectangle(0.0, 0.0, 1.0, 1.0)
        op = build_region_operator(region, cfg, QuadratureSpec(order=32, max_order=32))
        trace = tile_run(op, region, 2, "rectangle", cfg)
        assert len(trace) == 3
        assert [r.area for r in trace.steps] == [1.0, 4.0, 16.0]
        assert trace.steps[2].region == Rectangle(0.0, 0.0, 4.0, 4.0)
        assert trace.steps[0].step is None
        assert trace.steps[1].step.name == "gamma"
        assert trace.mode is TilingMode.RECTANGLE
        assert trace.growth == 4

    def test_rectangle_bounds_squeeze(self):
        """Chaque pas reste dans l'enveloppe 4·[λ_min, λ_max]."""
        cfg = TruncationConfig(32, effective_dim=8)
        region = Rectangle(0.0, 0.0, 0.5, 0.5)
        op = build_region_operator(region, cfg, QuadratureSpec(order=32, max_order=32))
        trace = tile_run(op, region, 2, TilingMode.RECTANGLE, cfg)
        for previous, current in zip(trace.steps, trace.steps[1:]):
            assert current.lambda_max <= 4.0 * previous.lambda_max + 1e-9
            assert current.lambda_min >= 4.0 * previous.lambda_min - 1e-9

    def test_disk_cluster_growth(self):
        """Un disque devient une grappe 2×2 puis 4×4."""
        cfg = TruncationConfig(48, effective_dim=8)
        trace = tile_run(disk_operator(0.5, cfg), Disk((0.0, 0.0), 1.0), 2, "disk", cfg)
        assert trace.steps[0].region == DiskCluster(0.0, 1.0, 0)
        assert trace.steps[1].region == DiskCluster(0.0, 1.0, 1)
        assert trace.steps[2].region == DiskCluster(0.0, 1.0, 3)
        assert trace.steps[2].area == pytest.approx(16.0 * np.pi / 4.0)
        assert trace.steps[1].step.name == "epsilon"

    def test_disk_step_matches_direct_quadrature(self):
        """Un pas de disques redonne l'opérateur de la grappe 2×2 calculé directement."""
        cfg = TruncationConfig(48)
        spec = QuadratureSpec(order=64, max_order=64)
        disk = Disk((0.0, 0.0), 1.0)
        trace = tile_run(build_region_operator(disk, cfg, spec), disk, 1, "disk", cfg)
        direct = build_region_operator(DiskCluster(0.0, 1.0, 1), cfg, spec)
        assert block_distance(trace.final_operator, direct, cfg, norm="fro") < 1e-4

    def test_initial_operator_kept_by_default(self):
        """Sans demande, l'opérateur initial n'est pas projeté."""
        cfg = TruncationConfig(12)
        op = disk_operator(0.5, cfg)
        trace = tile_run(op, Disk((0.0, 0.0), 1.0), 0, "disk", cfg)
        assert trace.final_operator is op

    def test_initial_compression(self):
        """Sur demande, l'opérateur initial est projeté sur le bloc effectif."""
        cfg = TruncationConfig(12)
        op = disk_operator(0.5, cfg)
        trace = tile_run(op, Disk((0.0, 0.0), 1.0), 0, "disk", cfg, compress=True)
        assert np.all(trace.final_operator.entries[6:, 6:] == 0.0)
        assert np.any(trace.final_operator.entries[:6, :6] != 0.0)

    def test_step_beyond_cutoff(self):
        """Un pas que la coupure ne représente pas est refusé."""
        cfg = TruncationConfig(16)
        with pytest.raises(MapParameterError, match="non unitaire"):
            tile_run(disk_operator(0.5, cfg), Disk((0.0, 0.0), 1.0), 1, "disk", cfg)

    def test_rectangle_mode_needs_rectangle(self):
        """Le mode rectangle refuse un disque."""
        cfg = TruncationConfig(6)
        with pytest.raises(RegionError):
            tile_run(disk_operator(0.5, cfg), Disk((0.0, 0.0), 1.0), 1, "rectangle", cfg)

    def test_disk_off_diagonal_center(self):
        """Le disque de départ doit être centré sur la diagonale."""
        cfg = TruncationConfig(6)
        with pytest.raises(RegionError):
            tile_run(disk_operator(0.5, cfg), Disk((0.0, 1.0), 1.0), 1, "disk", cfg)

    def test_disk_mode_refuses_polygon(self):
        """Le mode disque refuse un polygone."""
        cfg = TruncationConfig(6)
        with pytest.raises(RegionError):
            tile_run(disk_operator(0.5, cfg), CanonicalPolygon(1.0, 6), 1, "disk", cfg)

    def test_negative_steps(self):
        """Un nombre de pas négatif est refusé."""
        cfg = TruncationConfig(6)
        with pytest.raises(RegionError):
            tile_run(disk_operator(0.5, cfg), Disk((0.0, 0.0), 1.0), -1, "disk", cfg)
