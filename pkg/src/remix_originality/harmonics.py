"""Real spherical-harmonic analysis and the rotation-invariant shape descriptor.

A descriptor row holds, for one concentric sphere, the energy of each
harmonic degree: ``e_l = sqrt(sum_m a_lm^2)``. Rotations mix coefficients
only within a degree, so the energies do not change.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import BandwidthTooLow, DegenerateShape, DomainError, IncompatibleParams
from .mesh_io import TriangleMesh
from .sampling import (
    DEFAULT_BANDWIDTH,
    DEFAULT_DENSITY,
    DEFAULT_GRID_N,
    SphereSampleGrid,
    VoxelGrid,
    centroid_samples,
    compute_normalization,
    corner_samples,
    restrict_to_sphere,
    sample_surface,
    sphere_angles,
    voxelize,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_DEGREE = 16

Metric = Literal["l2", "l1"]
Quadrature = Literal["fejer", "midpoint"]


class DescriptorParams(BaseModel):
    """Provenance record; descriptors are comparable only when these match."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(DEFAULT_GRID_N, ge=8)
    radii: int = Field(DEFAULT_GRID_N // 2, ge=1)
    max_degree: int = Field(DEFAULT_MAX_DEGREE, ge=0)
    bandwidth: int = Field(DEFAULT_BANDWIDTH, ge=1)
    density: float = Field(DEFAULT_DENSITY, gt=0)
    seed: int = 42

    @model_validator(mode="after")
    def _check_chain(self) -> DescriptorParams:
        if self.n % 2:
            raise ValueError(f"grid resolution n must be even, got {self.n}")
        if self.radii > self.n // 2:
            raise ValueError(f"radii R={self.radii} exceeds n/2={self.n // 2}")
        if self.bandwidth < self.max_degree + 1:
            raise ValueError(f"bandwidth B={self.bandwidth} must be at least L+1={self.max_degree + 1}")
        return self

    @property
    def shape(self) -> tuple[int, int]:
        return (self.radii, self.max_degree + 1)


@dataclass(frozen=True, eq=False)
class ShapeDescriptor:
    energies: np.ndarray
    params: DescriptorParams

    def __post_init__(self) -> None:
        energies = np.asarray(self.energies, dtype=np.float64)
        if energies.shape != self.params.shape:
            raise ValueError(f"energies shape {energies.shape} does not match params {self.params.shape}")
        if not np.all(np.isfinite(energies)) or np.any(energies < 0):
            raise ValueError("descriptor energies must be finite and non-negative")
        energies.setflags(write=False)
        object.__setattr__(self, "energies", energies)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ShapeDescriptor):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.energies, other.energies)

    __hash__ = None  # type: ignore[assignment]

    def flat(self) -> np.ndarray:
        return self.energies.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.energies))

    def scaled(self, factor: float) -> ShapeDescriptor:
        return ShapeDescriptor(energies=self.energies * factor, params=self.params)


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------


def legendre_table(max_degree: int, x: np.ndarray) -> np.ndarray:
    """All P_l^m(x) for 0 <= m <= l <= L, shape (L+1, L+1, len(x)).

    Condon-Shortley phase included; entries with m > l are zero.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(np.abs(x) > 1.0) or np.any(np.isnan(x)):
        raise DomainError("associated Legendre functions need |x| <= 1")
    size = max_degree + 1
    table = np.zeros((size, size, x.size), dtype=np.float64)
    somx2 = np.sqrt((1.0 - x) * (1.0 + x))

    pmm = np.ones_like(x)
    for m in range(size):
        if m > 0:
            pmm = -pmm * (2 * m - 1) * somx2
        table[m, m] = pmm
        if m + 1 < size:
            table[m + 1, m] = x * (2 * m + 1) * pmm
        for ell in range(m + 2, size):
            table[ell, m] = ((2 * ell - 1) * x * table[ell - 1, m] - (ell + m - 1) * table[ell - 2, m]) / (ell - m)
    return table


def assoc_legendre(degree: int, order: int, x: float) -> float:
    """P_l^m(x) via upward recurrence in l."""
    if not 0 <= order <= degree:
        raise DomainError(f"order m={order} must lie in [0, l={degree}]")
    if not abs(x) <= 1.0:
        raise DomainError(f"|x| must be <= 1, got {x}")
    return float(legendre_table(degree, np.array([x]))[degree, order, 0])


def sh_norm(degree: int, order: int) -> float:
    """N(l, m) = sqrt((2l+1)(l-m)! / (4π (l+m)!))."""
    log_ratio = math.lgamma(degree - order + 1) - math.lgamma(degree + order + 1)
    return math.sqrt((2 * degree + 1) / (4.0 * math.pi) * math.exp(log_ratio))


def real_sh(degree: int, order: int, theta: float | np.ndarray, phi: float | np.ndarray) -> float | np.ndarray:
    """Orthonormal real spherical harmonic Y_l^m(θ, φ)."""
    if abs(order) > degree:
        raise DomainError(f"order m={order} must lie in [-l, l] for l={degree}")
    theta_arr = np.asarray(theta, dtype=np.float64)
    phi_arr = np.asarray(phi, dtype=np.float64)
    theta_b, phi_b = np.broadcast_arrays(theta_arr, phi_arr)
    m = abs(order)
    legendre = legendre_table(degree, np.cos(theta_b).reshape(-1))[degree, m].reshape(theta_b.shape)
    value = sh_norm(degree, m) * legendre
    if order > 0:
        value = math.sqrt(2.0) * value * np.cos(m * phi_b)
    elif order < 0:
        value = math.sqrt(2.0) * value * np.sin(m * phi_b)
    if value.ndim == 0:
        return float(value)
    return value


def quadrature_weights(bandwidth: int, rule: Quadrature = "fejer") -> np.ndarray:
    """Polar weights w_i standing in for sinθ_i·Δθ on the equiangular grid.

    ``fejer`` (Fejér's first rule in cosθ) is exact for polynomials in cosθ of
    degree below 2B; ``midpoint`` is the plain sinθ·Δθ rule.
    """
    theta, _ = sphere_angles(bandwidth)
    nodes = 2 * bandwidth
    if rule == "midpoint":
        return np.sin(theta) * np.pi / nodes
    k = np.arange(1, nodes // 2 + 1, dtype=np.float64)
    series = np.cos(2.0 * np.outer(theta, k)) / (4.0 * k * k - 1.0)
    return (2.0 / nodes) * (1.0 - 2.0 * series.sum(axis=1))


class HarmonicTable:
    """Precomputed separable basis on the 2B×2B grid for degrees 0..L.

    ``polar[l, m, i] = N(l,m)·P_l^m(cosθ_i)·w_i`` and the azimuthal factors
    ``cos(mφ_j)·Δφ`` / ``sin(mφ_j)·Δφ``. Instances are shared read-only.
    """

    def __init__(self, max_degree: int, bandwidth: int, rule: Quadrature = "fejer"):
        if bandwidth < max_degree + 1:
            raise BandwidthTooLow(bandwidth, max_degree)
        self.max_degree = max_degree
        self.bandwidth = bandwidth
        self.rule = rule

        theta, phi = sphere_angles(bandwidth)
        weights = quadrature_weights(bandwidth, rule)
        legendre = legendre_table(max_degree, np.cos(theta))
        norms = np.zeros((max_degree + 1, max_degree + 1))
        for ell in range(max_degree + 1):
            for m in range(ell + 1):
                norms[ell, m] = sh_norm(ell, m) * (1.0 if m == 0 else math.sqrt(2.0))
        self.polar = norms[:, :, None] * legendre * weights[None, None, :]

        dphi = 2.0 * np.pi / (2 * bandwidth)
        orders = np.arange(max_degree + 1, dtype=np.float64)
        self.cos_phi = np.cos(np.outer(phi, orders)) * dphi
        self.sin_phi = np.sin(np.outer(phi, orders)) * dphi
        for arr in (self.polar, self.cos_phi, self.sin_phi):
            arr.setflags(write=False)

    def coefficients(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(a_{l,+m}, a_{l,-m}) for a stack of sphere functions shaped (..., 2B, 2B)."""
        cos_part = values @ self.cos_phi
        sin_part = values @ self.sin_phi
        positive = np.einsum("lmi,...im->...lm", self.polar, cos_part)
        negative = np.einsum("lmi,...im->...lm", self.polar, sin_part)
        return positive, negative

    def energies(self, values: np.ndarray) -> np.ndarray:
        positive, negative = self.coefficients(values)
        return np.sqrt(np.sum(positive * positive + negative * negative, axis=-1))


@lru_cache(maxsize=8)
def harmonic_table(max_degree: int, bandwidth: int, rule: Quadrature = "fejer") -> HarmonicTable:
    return HarmonicTable(max_degree, bandwidth, rule)


def decompose_sphere(samples: SphereSampleGrid, max_degree: int, rule: Quadrature = "fejer") -> np.ndarray:
    """Per-degree energies e_0..e_L of one sphere function."""
    bandwidth = samples.bandwidth
    if bandwidth < max_degree + 1:
        raise BandwidthTooLow(bandwidth, max_degree)
    return harmonic_table(max_degree, bandwidth, rule).energies(samples.values)


def build_descriptor(grid: VoxelGrid, params: DescriptorParams) -> ShapeDescriptor:
    """Row k (1-based) holds the energies of the sphere of radius index k."""
    if grid.n != params.n:
        raise IncompatibleParams(f"grid n={grid.n}", f"params n={params.n}")
    table = harmonic_table(params.max_degree, params.bandwidth)
    rows = []
    for k in range(1, params.radii + 1):
        sphere = restrict_to_sphere(grid, k, params.bandwidth, radii=params.radii)
        rows.append(table.energies(sphere.values))
    return ShapeDescriptor(energies=np.vstack(rows), params=params)


def describe_mesh(mesh: TriangleMesh, params: DescriptorParams) -> ShapeDescriptor:
    """Full pipeline: sample, normalize, voxelize, build the descriptor.

    The sampling density is interpreted per unit of normalized area, so a
    pilot normalization from triangle centroids converts it to model units.
    When every centroid coincides (a single triangle, say) the pilot uses the
    triangle corners instead.
    """
    try:
        pilot = compute_normalization(centroid_samples(mesh))
    except DegenerateShape:
        pilot = compute_normalization(corner_samples(mesh))
    model_density = params.density * pilot.scale**2
    samples = sample_surface(mesh, model_density, seed=params.seed)
    transform = compute_normalization(samples)
    grid = voxelize(samples, transform, params.n)
    if grid.overflow:
        logger.info(f"{mesh.source_id or 'mesh'}: {grid.overflow} samples clamped outside the unit cube")
    return build_descriptor(grid, params)


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------


def descriptor_distance(a: ShapeDescriptor, b: ShapeDescriptor, metric: Metric = "l2") -> float:
    if a.params != b.params:
        raise IncompatibleParams(a.params, b.params)
    diff = a.energies - b.energies
    if metric == "l1":
        return float(np.sum(np.abs(diff)))
    return float(np.sqrt(np.sum(diff * diff)))


def distances_to(row: np.ndarray, matrix: np.ndarray, metric: Metric = "l2") -> np.ndarray:
    """Distances from one flattened descriptor to each row of ``matrix``."""
    diff = matrix - row
    if metric == "l1":
        return np.sum(np.abs(diff), axis=1)
    return np.sqrt(np.sum(diff * diff, axis=1))


def pairwise_distances(left: np.ndarray, right: np.ndarray | None = None, metric: Metric = "l2") -> np.ndarray:
    """Dense distance matrix between rows of flattened descriptors."""
    right = left if right is None else right
    out = np.empty((left.shape[0], right.shape[0]), dtype=np.float64)
    for i in range(left.shape[0]):
        out[i] = distances_to(left[i], right, metric)
    return out


def stack_descriptors(descriptors: dict[str, ShapeDescriptor], ids: list[str]) -> np.ndarray:
    """Flattened descriptors of ``ids`` as rows; all must share params."""
    if not ids:
        return np.empty((0, 0))
    params = descriptors[ids[0]].params
    for design_id in ids:
        if descriptors[design_id].params != params:
            raise IncompatibleParams(params, descriptors[design_id].params)
    return np.vstack([descriptors[design_id].flat() for design_id in ids])
