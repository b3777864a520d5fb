"""Synthetic remix corpora with known originality and inheritance labels.

Every design is either *original* (a fresh composite primitive, far from
everything before it) or *imitative* (a jittered, mildly stretched copy of an
earlier design). Children declare their parents; imitative roots are
unacknowledged copies and stay Standalone. Likes and makes are
negative-binomial counts whose means shift by the configured effect sizes.

Layout written by ``generate_synthetic``::

    <out>/meshes/<id>.stl
    <out>/metadata.csv
    <out>/truth.csv        id,true_class
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
import pandas as pd
import trimesh
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..errors import ConfigError
from ..mesh_io import TriangleMesh, write_stl
from .metadata import DesignRecord, write_metadata

logger = logging.getLogger(__name__)

FAMILIES = ("icosphere", "box", "cylinder", "torus")
ORIGINAL = "original"
IMITATIVE = "imitative"
BASE_TIMESTAMP = 1_500_000_000
TIMESTAMP_STEP = 3600

# Above this jitter magnitude imitative copies stop being reliably closer to
# their sources than original designs are to their nearest neighbours.
MAX_VALID_PERTURBATION = 0.05

Family = Literal["icosphere", "box", "cylinder", "torus"]


class SynthConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_designs: int = Field(100, ge=10)
    remix_fraction: float = Field(0.5, ge=0.0, le=1.0)
    original_fraction: float = Field(0.4, gt=0.0, lt=1.0)
    multi_parent_fraction: float = Field(0.15, ge=0.0, le=1.0)
    perturbation: float = Field(0.01, ge=0.0)
    anisotropy_ratio: float = Field(2.0, ge=0.0)
    likes_base: float = Field(10.0, ge=0.0)
    likes_original_effect: float = 5.5
    likes_inherited_effect: float = 4.0
    makes_base: float = Field(0.7, ge=0.0)
    makes_original_effect: float = 0.25
    makes_inherited_effect: float = 0.45
    dispersion: float = Field(2.0, gt=0.0)
    subdivisions: int = Field(2, ge=1, le=4)
    seed: int = 42

    @classmethod
    def build(cls, **values: object) -> SynthConfig:
        """Construct from loose values, mapping validation failures to ``ConfigError``."""
        try:
            return cls(**{key: value for key, value in values.items() if value is not None})
        except ValidationError as exc:
            raise ConfigError(f"invalid synthetic corpus configuration: {exc}") from exc


@dataclass(frozen=True)
class FreshShape:
    family: str
    aspect: tuple[float, float, float]
    features: tuple[tuple[str, tuple[float, float, float], float], ...]


@dataclass(frozen=True)
class CopyShape:
    source: int
    jitter_seed: int
    stretch: tuple[float, float, float]


@dataclass
class PlannedDesign:
    index: int
    id: str
    true_class: str
    family: str
    shape: FreshShape | CopyShape
    parent_ids: list[str] = field(default_factory=list)
    timestamp: int = 0
    likes: int = 0
    makes: int = 0

    @property
    def inherited(self) -> bool:
        return bool(self.parent_ids)


@dataclass
class SyntheticCorpus:
    directory: Path | None
    designs: list[PlannedDesign]

    @property
    def truth(self) -> dict[str, str]:
        return {design.id: design.true_class for design in self.designs}

    def records(self) -> list[DesignRecord]:
        return [
            DesignRecord(
                id=design.id,
                mesh_path=f"meshes/{design.id}.stl",
                likes=design.likes,
                makes=design.makes,
                parent_ids=list(design.parent_ids),
                timestamp=design.timestamp,
            )
            for design in self.designs
        ]


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


def make_primitive(family: str, subdivisions: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Unit-sized primitive as (points, faces), centred on the origin."""
    if family == "icosphere":
        mesh = trimesh.creation.icosphere(subdivisions=subdivisions, radius=1.0)
    elif family == "box":
        mesh = trimesh.creation.box(extents=(1.6, 1.6, 1.6))
    elif family == "cylinder":
        mesh = trimesh.creation.cylinder(radius=0.8, height=1.6, sections=8 * (subdivisions + 1))
    elif family == "torus":
        mesh = trimesh.creation.torus(
            major_radius=0.8,
            minor_radius=0.3,
            major_sections=8 * (subdivisions + 1),
            minor_sections=4 * (subdivisions + 1),
        )
    else:
        raise ConfigError(f"unknown primitive family {family!r}")
    return np.asarray(mesh.vertices, dtype=np.float64), np.asarray(mesh.faces, dtype=np.int64)


def merge_parts(parts: list[tuple[np.ndarray, np.ndarray]]) -> tuple[np.ndarray, np.ndarray]:
    points, faces, offset = [], [], 0
    for part_points, part_faces in parts:
        points.append(part_points)
        faces.append(part_faces + offset)
        offset += len(part_points)
    return np.vstack(points), np.vstack(faces)


def perturb(
    points: np.ndarray, magnitude: float, stretch: tuple[float, float, float], rng: np.random.Generator
) -> np.ndarray:
    """Gaussian vertex jitter scaled by the mean vertex radius, then per-axis stretch."""
    reference = float(np.mean(np.linalg.norm(points - points.mean(axis=0), axis=1)))
    jittered = points + rng.normal(0.0, magnitude * reference, size=points.shape)
    return jittered * np.asarray(stretch)


def random_fresh_shape(rng: np.random.Generator, family: str) -> FreshShape:
    aspect = tuple(float(v) for v in rng.uniform(0.6, 1.6, size=3))
    features = []
    for _ in range(int(rng.integers(1, 3))):
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        size = float(rng.uniform(0.25, 0.5))
        features.append((str(rng.choice(FAMILIES)), tuple(float(v) for v in direction), size))
    return FreshShape(family=family, aspect=aspect, features=tuple(features))


def build_fresh(shape: FreshShape, subdivisions: int) -> tuple[np.ndarray, np.ndarray]:
    base_points, base_faces = make_primitive(shape.family, subdivisions)
    base_points = base_points * np.asarray(shape.aspect)
    parts = [(base_points, base_faces)]
    for family, direction, size in shape.features:
        points, faces = make_primitive(family, subdivisions)
        direction_arr = np.asarray(direction)
        reach = float(np.max(base_points @ direction_arr))
        parts.append((points * size + direction_arr * reach, faces))
    return merge_parts(parts)


# ---------------------------------------------------------------------------
# Planning
# ---------------------------------------------------------------------------


def _negative_binomial(rng: np.random.Generator, mean: float, dispersion: float) -> int:
    if mean <= 0.0:
        return 0
    return int(rng.negative_binomial(dispersion, dispersion / (dispersion + mean)))


def draw_outcomes(designs: list[PlannedDesign], config: SynthConfig, rng: np.random.Generator) -> None:
    for design in designs:
        is_original = design.true_class == ORIGINAL
        likes_mean = (
            config.likes_base
            + config.likes_original_effect * is_original
            + config.likes_inherited_effect * design.inherited
        )
        makes_mean = (
            config.makes_base
            + config.makes_original_effect * is_original
            + config.makes_inherited_effect * design.inherited
        )
        design.likes = _negative_binomial(rng, likes_mean, config.dispersion)
        design.makes = _negative_binomial(rng, makes_mean, config.dispersion)


def plan_synthetic(config: SynthConfig) -> SyntheticCorpus:
    """Decide ids, classes, parents, shapes and outcomes without building meshes."""
    rng = np.random.default_rng(config.seed)
    n = config.n_designs
    width = max(4, len(str(n - 1)))
    ids = [f"d{index:0{width}d}" for index in range(n)]

    n_children = min(int(round(config.remix_fraction * n)), n - 2)
    child_indices = set(rng.choice(np.arange(2, n), size=n_children, replace=False).tolist()) if n_children else set()

    designs: list[PlannedDesign] = []
    for index in range(n):
        is_original = index == 0 or bool(rng.random() < config.original_fraction)
        parent_ids: list[str] = []
        source = int(rng.integers(0, index)) if index else 0
        if index in child_indices:
            parent_ids.append(ids[source])
            if rng.random() < config.multi_parent_fraction and index > 1:
                second = int(rng.integers(0, index))
                if second != source:
                    parent_ids.append(ids[second])

        if is_original:
            avoid = designs[source].family if parent_ids else None
            choices = [family for family in FAMILIES if family != avoid]
            family = str(rng.choice(choices))
            shape: FreshShape | CopyShape = random_fresh_shape(rng, family)
        else:
            family = designs[source].family
            spread = config.anisotropy_ratio * config.perturbation
            stretch = tuple(float(v) for v in 1.0 + rng.uniform(-spread, spread, size=3))
            shape = CopyShape(source=source, jitter_seed=int(rng.integers(0, 2**31 - 1)), stretch=stretch)

        designs.append(
            PlannedDesign(
                index=index,
                id=ids[index],
                true_class=ORIGINAL if is_original else IMITATIVE,
                family=family,
                shape=shape,
                parent_ids=parent_ids,
                timestamp=BASE_TIMESTAMP + index * TIMESTAMP_STEP,
            )
        )

    draw_outcomes(designs, config, rng)
    return SyntheticCorpus(directory=None, designs=designs)


def build_geometry(corpus: SyntheticCorpus, config: SynthConfig) -> dict[str, TriangleMesh]:
    geometry: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    meshes: dict[str, TriangleMesh] = {}
    for design in corpus.designs:
        if isinstance(design.shape, FreshShape):
            points, faces = build_fresh(design.shape, config.subdivisions)
        else:
            source_points, faces = geometry[design.shape.source]
            rng = np.random.default_rng(design.shape.jitter_seed)
            points = perturb(source_points, config.perturbation, design.shape.stretch, rng)
        geometry[design.index] = (points, faces)
        meshes[design.id] = TriangleMesh.from_arrays(points, faces, source_id=design.id)
    return meshes


def generate_synthetic(config: SynthConfig, out_dir: str | Path) -> SyntheticCorpus:
    """Write meshes, metadata.csv and truth.csv under ``out_dir``."""
    if config.perturbation > MAX_VALID_PERTURBATION:
        logger.warning(
            f"perturbation {config.perturbation} exceeds {MAX_VALID_PERTURBATION}; "
            "imitative copies may not be separable from original designs"
        )
    out = Path(out_dir)
    (out / "meshes").mkdir(parents=True, exist_ok=True)

    corpus = plan_synthetic(config)
    for design_id, mesh in build_geometry(corpus, config).items():
        write_stl(mesh, out / "meshes" / f"{design_id}.stl")
    write_metadata(corpus.records(), out / "metadata.csv")
    write_truth(corpus.truth, out / "truth.csv")
    corpus.directory = out
    logger.info(f"wrote synthetic corpus of {len(corpus.designs)} designs to {out}")
    return corpus


def write_truth(truth: dict[str, str], path: str | Path) -> None:
    frame = pd.DataFrame({"id": list(truth), "true_class": list(truth.values())})
    frame.to_csv(path, index=False, lineterminator="\n")


def load_truth(path: str | Path) -> dict[str, str]:
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    return dict(zip(frame["id"], frame["true_class"], strict=True))
