"""Shared test configuration.

The remix_originality package is available via ``pip install -e .`` (editable install).
No sys.path manipulation is required.
"""

from __future__ import annotations

import numpy as np
import pytest
import trimesh

from remix_originality.corpus import DesignRecord, corpus_from_records
from remix_originality.harmonics import DescriptorParams, ShapeDescriptor
from remix_originality.mesh_io import TriangleMesh

# Small enough for unit tests to stay fast, large enough to resolve shape.
SMALL_PARAMS = DescriptorParams(n=16, radii=8, max_degree=4, bandwidth=8, density=800.0, seed=3)

# 1-D stand-in descriptors: a single energy per design.
SCALAR_PARAMS = DescriptorParams(n=8, radii=1, max_degree=0, bandwidth=1, density=1.0, seed=0)


def scalar_descriptor(value: float) -> ShapeDescriptor:
    return ShapeDescriptor(energies=np.array([[float(value)]]), params=SCALAR_PARAMS)


def vector_descriptor(values, params: DescriptorParams | None = None) -> ShapeDescriptor:
    values = np.asarray(values, dtype=np.float64)
    params = params or DescriptorParams(
        n=max(8, 2 * values.size), radii=values.size, max_degree=0, bandwidth=1, density=1.0, seed=0
    )
    return ShapeDescriptor(energies=values.reshape(params.shape), params=params)


def record(design_id: str, parents=(), likes: int = 0, makes: int = 0, timestamp: int | None = None) -> DesignRecord:
    return DesignRecord(
        id=design_id,
        mesh_path=f"meshes/{design_id}.stl",
        likes=likes,
        makes=makes,
        parent_ids=list(parents),
        timestamp=timestamp,
    )


def mesh_from_trimesh(mesh: trimesh.Trimesh, source_id: str = "") -> TriangleMesh:
    return TriangleMesh.from_arrays(mesh.vertices, mesh.faces, source_id=source_id)


@pytest.fixture
def small_params() -> DescriptorParams:
    return SMALL_PARAMS


@pytest.fixture
def unit_triangle() -> TriangleMesh:
    return TriangleMesh(vertices=np.array([[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]]), source_id="tri")


@pytest.fixture
def cube_mesh() -> TriangleMesh:
    return mesh_from_trimesh(trimesh.creation.box(extents=(2.0, 2.0, 2.0)), "cube")


@pytest.fixture
def sphere_mesh() -> TriangleMesh:
    return mesh_from_trimesh(trimesh.creation.icosphere(subdivisions=2, radius=1.0), "sphere")


@pytest.fixture
def bumpy_sphere_mesh() -> TriangleMesh:
    """Icosphere with a small box stuck to one side, so it has no rotational symmetry."""
    sphere = trimesh.creation.icosphere(subdivisions=2, radius=1.0)
    bump = trimesh.creation.box(extents=(0.5, 0.3, 0.4))
    bump.apply_translation((0.9, 0.2, 0.1))
    merged = trimesh.util.concatenate([sphere, bump])
    return mesh_from_trimesh(merged, "bumpy")


@pytest.fixture
def abc_corpus():
    """A=(0), B=(3), C=(4) with the single edge B -> C."""
    corpus = corpus_from_records(
        [record("A", timestamp=1), record("B", timestamp=2), record("C", parents=["B"], timestamp=3)]
    )
    descriptors = {"A": scalar_descriptor(0.0), "B": scalar_descriptor(3.0), "C": scalar_descriptor(4.0)}
    return corpus, descriptors
