"""Surface sampling, normalization, voxelization and sphere restriction.

Grid convention: voxel ``i`` along an axis covers normalized coordinates
``[-1 + 2i/n, -1 + 2(i+1)/n)``; occupancy values live at voxel centers, so the
continuous index of the origin is ``n/2 - 0.5`` for trilinear sampling.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateShape, RadiusOutOfRange, ZeroArea
from .mesh_io import TriangleMesh

logger = logging.getLogger(__name__)

DEFAULT_GRID_N = 64
DEFAULT_BANDWIDTH = 64
DEFAULT_DENSITY = 5000.0
DEFAULT_TARGET_MEAN_RADIUS = 0.5


@dataclass(frozen=True, eq=False)
class SurfaceSamples:
    points: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def centroid(self) -> np.ndarray:
        return self.weights @ self.points


@dataclass(frozen=True)
class NormalizationTransform:
    """Translate by ``translation`` then scale by ``scale``."""

    translation: tuple[float, float, float]
    scale: float

    def apply(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points, dtype=np.float64) + np.asarray(self.translation)) * self.scale


@dataclass(frozen=True, eq=False)
class VoxelGrid:
    values: np.ndarray
    overflow: int = 0

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def __post_init__(self) -> None:
        shape = self.values.shape
        if len(shape) != 3 or len(set(shape)) != 1:
            raise ValueError(f"voxel grid must be cubic, got shape {shape}")
        if shape[0] < 8 or shape[0] % 2:
            raise ValueError(f"grid resolution must be even and at least 8, got {shape[0]}")

    def occupied(self) -> np.ndarray:
        """Indices of nonzero voxels, shape (k, 3)."""
        return np.argwhere(self.values > 0)


@dataclass(frozen=True, eq=False)
class SphereSampleGrid:
    radius_index: int
    values: np.ndarray

    @property
    def bandwidth(self) -> int:
        return int(self.values.shape[0] // 2)


def sample_surface(mesh: TriangleMesh, samples_per_unit_area: float, seed: int = 0) -> SurfaceSamples:
    """Uniform barycentric samples, ``max(1, round(density·area))`` per triangle.

    Degenerate triangles receive no samples since their weight would be zero.
    """
    areas = mesh.triangle_areas()
    total = float(np.sum(areas))
    if total <= 0.0:
        raise ZeroArea(mesh.source_id)

    live = np.flatnonzero(areas > 0.0)
    counts = np.maximum(1, np.rint(samples_per_unit_area * areas[live])).astype(np.int64)
    owner = np.repeat(live, counts)

    rng = np.random.default_rng(seed)
    r1 = np.sqrt(rng.random(owner.size))
    r2 = rng.random(owner.size)
    tri = mesh.vertices[owner]
    points = (
        (1.0 - r1)[:, None] * tri[:, 0]
        + (r1 * (1.0 - r2))[:, None] * tri[:, 1]
        + (r1 * r2)[:, None] * tri[:, 2]
    )
    weights = np.repeat(areas[live] / (total * counts), counts)
    return SurfaceSamples(points=points, weights=weights)


def centroid_samples(mesh: TriangleMesh) -> SurfaceSamples:
    """One area-weighted sample per triangle centroid; a cheap pilot for density scaling."""
    areas = mesh.triangle_areas()
    total = float(np.sum(areas))
    if total <= 0.0:
        raise ZeroArea(mesh.source_id)
    return SurfaceSamples(points=mesh.vertices.mean(axis=1), weights=areas / total)


def corner_samples(mesh: TriangleMesh) -> SurfaceSamples:
    """Triangle corners carrying a third of their triangle's area each."""
    areas = mesh.triangle_areas()
    total = float(np.sum(areas))
    if total <= 0.0:
        raise ZeroArea(mesh.source_id)
    weights = np.repeat(areas / (3.0 * total), 3)
    return SurfaceSamples(points=mesh.vertices.reshape(-1, 3), weights=weights)


def compute_normalization(
    samples: SurfaceSamples, target_mean_radius: float = DEFAULT_TARGET_MEAN_RADIUS
) -> NormalizationTransform:
    """Center on the weighted centroid and scale the weighted mean radius to the target."""
    if not 0.0 < target_mean_radius < 1.0:
        raise ValueError(f"target_mean_radius must lie in (0, 1), got {target_mean_radius}")
    if len(samples) == 0:
        raise DegenerateShape()
    center = samples.centroid()
    radii = np.linalg.norm(samples.points - center, axis=1)
    mean_radius = float(samples.weights @ radii)
    if not mean_radius > 0.0:
        raise DegenerateShape()
    translation = tuple(float(c) for c in -center)
    return NormalizationTransform(translation=translation, scale=target_mean_radius / mean_radius)


def voxelize(samples: SurfaceSamples, transform: NormalizationTransform, n: int = DEFAULT_GRID_N) -> VoxelGrid:
    """Binary surface occupancy; points outside [-1, 1]³ are clamped and counted."""
    points = transform.apply(samples.points)
    outside = np.any(np.abs(points) > 1.0, axis=1)
    overflow = int(np.count_nonzero(outside))
    if overflow:
        logger.debug(f"voxelize: {overflow} of {len(points)} points clamped to the grid boundary")

    index = np.clip(np.floor((points + 1.0) * 0.5 * n), 0, n - 1).astype(np.int64)
    values = np.zeros((n, n, n), dtype=np.float64)
    values[index[:, 0], index[:, 1], index[:, 2]] = 1.0
    return VoxelGrid(values=values, overflow=overflow)


@lru_cache(maxsize=8)
def sphere_angles(bandwidth: int) -> tuple[np.ndarray, np.ndarray]:
    """Equiangular grid: θᵢ = (i+½)π/2B and φⱼ = (j+½)2π/2B."""
    idx = np.arange(2 * bandwidth, dtype=np.float64)
    theta = (idx + 0.5) * np.pi / (2 * bandwidth)
    phi = (idx + 0.5) * 2.0 * np.pi / (2 * bandwidth)
    theta.setflags(write=False)
    phi.setflags(write=False)
    return theta, phi


@lru_cache(maxsize=8)
def _unit_directions(bandwidth: int) -> np.ndarray:
    theta, phi = sphere_angles(bandwidth)
    st, ct = np.sin(theta)[:, None], np.cos(theta)[:, None]
    dirs = np.stack(
        [st * np.cos(phi)[None, :], st * np.sin(phi)[None, :], np.broadcast_to(ct, (theta.size, phi.size))],
        axis=-1,
    )
    dirs.setflags(write=False)
    return dirs


def trilinear(values: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Trilinear interpolation at continuous voxel-center coordinates; outside reads as 0."""
    n = values.shape[0]
    base = np.floor(coords)
    frac = coords - base
    base = base.astype(np.int64)
    out = np.zeros(coords.shape[:-1], dtype=np.float64)
    for dx in (0, 1):
        wx = frac[..., 0] if dx else 1.0 - frac[..., 0]
        ix = base[..., 0] + dx
        for dy in (0, 1):
            wy = frac[..., 1] if dy else 1.0 - frac[..., 1]
            iy = base[..., 1] + dy
            for dz in (0, 1):
                wz = frac[..., 2] if dz else 1.0 - frac[..., 2]
                iz = base[..., 2] + dz
                inside = (ix >= 0) & (ix < n) & (iy >= 0) & (iy < n) & (iz >= 0) & (iz < n)
                picked = np.zeros(out.shape, dtype=np.float64)
                picked[inside] = values[ix[inside], iy[inside], iz[inside]]
                out += wx * wy * wz * picked
    return out


def restrict_to_sphere(
    grid: VoxelGrid, radius_index: int, bandwidth: int, radii: int | None = None
) -> SphereSampleGrid:
    """Sample the grid on the sphere of normalized radius k/R about the grid center.

    With the default ``R = n/2`` the sphere of index k lies k voxel units from
    the center.
    """
    n = grid.n
    radii = n // 2 if radii is None else radii
    if not 1 <= radius_index <= radii:
        raise RadiusOutOfRange(radius_index, radii)
    radius_voxels = (radius_index / radii) * (n / 2.0)
    center = n / 2.0 - 0.5
    coords = center + radius_voxels * _unit_directions(bandwidth)
    return SphereSampleGrid(radius_index=radius_index, values=trilinear(grid.values, coords))
