"""Tests for the spherical-harmonic machinery and descriptor distances."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from pydantic import ValidationError

from remix_originality.errors import BandwidthTooLow, DomainError, IncompatibleParams
from remix_originality.harmonics import (
    DescriptorParams,
    ShapeDescriptor,
    assoc_legendre,
    build_descriptor,
    decompose_sphere,
    describe_mesh,
    descriptor_distance,
    harmonic_table,
    pairwise_distances,
    quadrature_weights,
    real_sh,
    stack_descriptors,
)
from remix_originality.sampling import SphereSampleGrid, VoxelGrid, sphere_angles
from tests.conftest import SMALL_PARAMS, vector_descriptor

PAIR_PARAMS = DescriptorParams(n=8, radii=1, max_degree=1, bandwidth=2, density=1.0, seed=0)


def _grid_angles(bandwidth: int):
    theta, phi = sphere_angles(bandwidth)
    return np.meshgrid(theta, phi, indexing="ij")


def _sphere_function(values: np.ndarray) -> SphereSampleGrid:
    return SphereSampleGrid(radius_index=1, values=values)


class TestLegendre:
    @pytest.mark.parametrize(
        ("degree", "order", "x", "expected"),
        [
            (0, 0, 0.3, 1.0),
            (1, 0, 0.7, 0.7),
            (2, 0, 0.5, -0.125),
            (1, 1, 0.6, -0.8),  # Condon-Shortley: -sqrt(1 - x^2)
            (2, 2, 0.6, 3.0 * 0.64),
        ],
    )
    def test_closed_forms(self, degree, order, x, expected):
        assert assoc_legendre(degree, order, x) == pytest.approx(expected, abs=1e-14)

    def test_outside_unit_interval(self):
        with pytest.raises(DomainError):
            assoc_legendre(2, 0, 1.5)

    def test_order_above_degree(self):
        with pytest.raises(DomainError):
            assoc_legendre(1, 2, 0.0)


class TestRealHarmonics:
    def test_constant_harmonic(self):
        assert real_sh(0, 0, 1.1, 2.3) == pytest.approx(1.0 / (2.0 * math.sqrt(math.pi)), abs=1e-15)

    def test_dipole_at_pole(self):
        assert real_sh(1, 0, 0.0, 0.0) == pytest.approx(math.sqrt(3.0 / (4.0 * math.pi)), abs=1e-15)

    def test_sine_branch_for_negative_order(self):
        theta, phi = 0.9, 0.4
        expected = math.sqrt(2.0) * math.sqrt(3.0 / (8.0 * math.pi)) * -math.sin(theta) * math.sin(phi)

        assert real_sh(1, -1, theta, phi) == pytest.approx(expected, abs=1e-14)

    def test_orthonormal_on_the_sampling_grid(self):
        """All pairs up to degree 16 at B=64 integrate to the identity within 1e-6."""
        bandwidth, max_degree = 64, 16
        theta, phi = _grid_angles(bandwidth)
        weights = quadrature_weights(bandwidth)[:, None] * (2.0 * np.pi / (2 * bandwidth))

        basis = np.array(
            [
                real_sh(degree, order, theta, phi).reshape(-1)
                for degree in range(max_degree + 1)
                for order in range(-degree, degree + 1)
            ]
        )
        gram = (basis * np.broadcast_to(weights, theta.shape).reshape(-1)) @ basis.T

        assert np.max(np.abs(gram - np.eye(len(basis)))) < 1e-6

    def test_midpoint_rule_is_less_accurate(self):
        bandwidth = 64

        fejer = np.sum(quadrature_weights(bandwidth, "fejer"))
        midpoint = np.sum(quadrature_weights(bandwidth, "midpoint"))

        assert fejer == pytest.approx(2.0, abs=1e-13)
        assert abs(midpoint - 2.0) > abs(fejer - 2.0)


class TestDecomposeSphere:
    def test_constant_function(self):
        energies = decompose_sphere(_sphere_function(np.ones((16, 16))), 6)

        assert energies[0] == pytest.approx(2.0 * math.sqrt(math.pi), abs=1e-9)
        assert np.all(energies[1:] < 1e-6)

    def test_single_harmonic(self):
        theta, phi = _grid_angles(16)

        energies = decompose_sphere(_sphere_function(real_sh(3, 2, theta, phi)), 8)

        assert energies[3] == pytest.approx(1.0, abs=1e-6)
        assert np.all(np.delete(energies, 3) < 1e-6)

    def test_band_limited_synthesis(self):
        rng = np.random.default_rng(9)
        max_degree, bandwidth = 6, 8
        theta, phi = _grid_angles(bandwidth)
        values = np.zeros_like(theta)
        expected = np.zeros(max_degree + 1)
        for degree in range(max_degree + 1):
            coefficients = rng.normal(size=2 * degree + 1)
            expected[degree] = np.linalg.norm(coefficients)
            for order, coefficient in zip(range(-degree, degree + 1), coefficients, strict=True):
                values += coefficient * real_sh(degree, order, theta, phi)

        energies = decompose_sphere(_sphere_function(values), max_degree)

        np.testing.assert_allclose(energies, expected, atol=1e-9)

    def test_parseval_bound(self):
        theta, phi = _grid_angles(8)
        values = 0.4 * real_sh(2, 1, theta, phi) - 1.3 * real_sh(5, -4, theta, phi)
        weights = quadrature_weights(8)[:, None] * (2.0 * np.pi / 16)

        energies = decompose_sphere(_sphere_function(values), 7)

        assert np.sum(energies**2) <= np.sum(weights * values**2) + 1e-6

    def test_bandwidth_too_low(self):
        with pytest.raises(BandwidthTooLow):
            decompose_sphere(_sphere_function(np.ones((8, 8))), 4)

    def test_tables_are_shared(self):
        assert harmonic_table(4, 8) is harmonic_table(4, 8)


class TestDescriptorParams:
    def test_defaults(self):
        params = DescriptorParams()

        assert (params.n, params.radii, params.max_degree, params.bandwidth) == (64, 32, 16, 64)
        assert params.shape == (32, 17)

    @pytest.mark.parametrize(
        "values",
        [
            {"n": 15, "radii": 7},
            {"n": 16, "radii": 9},
            {"max_degree": 16, "bandwidth": 16},
            {"density": 0.0},
        ],
    )
    def test_constraint_chain(self, values):
        with pytest.raises(ValidationError):
            DescriptorParams(**values)


class TestBuildDescriptor:
    def test_zero_grid_gives_zero_descriptor(self):
        descriptor = build_descriptor(VoxelGrid(values=np.zeros((16, 16, 16))), SMALL_PARAMS)

        assert descriptor.energies.shape == SMALL_PARAMS.shape
        assert np.all(descriptor.energies == 0.0)

    def test_same_mesh_twice_is_bit_identical(self, bumpy_sphere_mesh):
        first = describe_mesh(bumpy_sphere_mesh, SMALL_PARAMS)
        second = describe_mesh(bumpy_sphere_mesh, SMALL_PARAMS)

        assert first == second
        assert first.energies.tobytes() == second.energies.tobytes()

    def test_single_triangle_describes(self, unit_triangle):
        descriptor = describe_mesh(unit_triangle, SMALL_PARAMS)

        assert descriptor.energies.shape == SMALL_PARAMS.shape
        assert np.all(np.isfinite(descriptor.energies))
        assert np.any(descriptor.energies > 0.0)

    def test_grid_and_params_must_agree(self):
        with pytest.raises(IncompatibleParams):
            build_descriptor(VoxelGrid(values=np.zeros((8, 8, 8))), SMALL_PARAMS)

    def test_energies_are_validated(self):
        with pytest.raises(ValueError):
            ShapeDescriptor(energies=np.full(PAIR_PARAMS.shape, -1.0), params=PAIR_PARAMS)


class TestDescriptorDistance:
    def test_three_four_five(self):
        a = ShapeDescriptor(energies=np.array([[3.0, 4.0]]), params=PAIR_PARAMS)
        b = ShapeDescriptor(energies=np.zeros((1, 2)), params=PAIR_PARAMS)

        assert descriptor_distance(a, b) == 5.0
        assert descriptor_distance(a, b, metric="l1") == 7.0

    def test_identity(self):
        a = vector_descriptor([0.2, 1.5, 3.0])

        assert descriptor_distance(a, a) == 0.0

    def test_incompatible_params(self):
        a = ShapeDescriptor(energies=np.zeros((1, 2)), params=PAIR_PARAMS)
        b = vector_descriptor([0.0, 0.0])

        with pytest.raises(IncompatibleParams):
            descriptor_distance(a, b)

    def test_scaling_scales_distance(self):
        a, b = vector_descriptor([1.0, 2.0]), vector_descriptor([4.0, 6.0])

        assert descriptor_distance(a.scaled(3.0), b.scaled(3.0)) == pytest.approx(3.0 * descriptor_distance(a, b))

    def test_pairwise_matrix_matches_pairwise_calls(self):
        rng = np.random.default_rng(4)
        descriptors = {f"d{i}": vector_descriptor(rng.random(5)) for i in range(6)}
        ids = sorted(descriptors)

        matrix = pairwise_distances(stack_descriptors(descriptors, ids))

        for i, left in enumerate(ids):
            for j, right in enumerate(ids):
                assert matrix[i, j] == pytest.approx(descriptor_distance(descriptors[left], descriptors[right]))


_energy_rows = arrays(np.float64, 6, elements=st.floats(0.0, 1e3, allow_nan=False, allow_infinity=False))


@settings(max_examples=300, deadline=None)
@given(_energy_rows, _energy_rows, _energy_rows, st.sampled_from(["l2", "l1"]))
def test_metric_axioms(x, y, z, metric):
    a, b, c = (vector_descriptor(values) for values in (x, y, z))

    ab = descriptor_distance(a, b, metric)
    assert ab >= 0.0
    assert ab == descriptor_distance(b, a, metric)
    assert descriptor_distance(a, a, metric) == 0.0
    assert descriptor_distance(a, c, metric) <= ab + descriptor_distance(b, c, metric) + 1e-12 * (1.0 + ab)
