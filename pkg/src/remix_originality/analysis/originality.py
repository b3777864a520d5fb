"""Originality scores from descriptor distances and the mean split."""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..corpus.graph import RemixGraph
from ..errors import NoDescriptor, NoParents, SingletonCorpus, TooFewScores
from ..harmonics import Metric, ShapeDescriptor, descriptor_distance, distances_to, stack_descriptors
from ..parallel import ordered_map

logger = logging.getLogger(__name__)

ORIGINAL = "original"
IMITATIVE = "imitative"

EARLIEST_FALLBACK = "no strictly earlier design with a descriptor; compared against all others"


class OriginalityMode(str, Enum):
    PARENT_MIN = "parent-min"
    NEAREST_NEIGHBOR = "nearest-neighbor"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class OriginalityScore:
    design_id: str
    distance: float
    mode_used: OriginalityMode


@dataclass(frozen=True)
class OriginalityPartition:
    threshold: float
    original_ids: tuple[str, ...]
    imitative_ids: tuple[str, ...]

    def label(self, design_id: str) -> str:
        return ORIGINAL if design_id in self.original_set else IMITATIVE

    @property
    def original_set(self) -> frozenset[str]:
        return frozenset(self.original_ids)

    @property
    def imitative_set(self) -> frozenset[str]:
        return frozenset(self.imitative_ids)


@dataclass
class ScoringResult:
    scores: list[OriginalityScore]
    notes: list[str] = field(default_factory=list)

    @property
    def earliest_fallbacks(self) -> int:
        return sum(note.endswith(EARLIEST_FALLBACK) for note in self.notes)


class DescriptorIndex:
    """Flattened descriptors in a fixed id order, shared read-only by scorers."""

    def __init__(
        self,
        descriptors: Mapping[str, ShapeDescriptor],
        timestamps: Mapping[str, int] | None = None,
        metric: Metric = "l2",
    ):
        self.descriptors = descriptors
        self.ids = sorted(descriptors)
        self.position = {design_id: i for i, design_id in enumerate(self.ids)}
        self.matrix = stack_descriptors(dict(descriptors), self.ids)
        self.metric = metric
        self.timestamps = timestamps
        self.stamp = np.array(
            [np.nan if timestamps is None or timestamps.get(i) is None else float(timestamps[i]) for i in self.ids]
        )

    def __len__(self) -> int:
        return len(self.ids)

    def candidates(self, design_id: str) -> tuple[np.ndarray, bool]:
        """Positions eligible as neighbours, and whether the prior-only rule applied."""
        own = self.position[design_id]
        mask = np.ones(len(self.ids), dtype=bool)
        mask[own] = False
        restricted = False
        if self.timestamps is not None and not np.isnan(self.stamp[own]):
            earlier = mask & (np.isnan(self.stamp) | (self.stamp < self.stamp[own]))
            if np.any(earlier):
                mask = earlier
                restricted = True
        return np.flatnonzero(mask), restricted


def _nearest(design_id: str, index: DescriptorIndex, notes: list[str]) -> float:
    positions, restricted = index.candidates(design_id)
    if index.timestamps is not None and not restricted:
        notes.append(f"{design_id}: {EARLIEST_FALLBACK}")
    own = index.matrix[index.position[design_id]]
    return float(np.min(distances_to(own, index.matrix[positions], index.metric)))


def originality_score(
    design_id: str,
    descriptors: Mapping[str, ShapeDescriptor],
    graph: RemixGraph,
    mode: OriginalityMode | str = OriginalityMode.HYBRID,
    timestamps: Mapping[str, int] | None = None,
    metric: Metric = "l2",
    index: DescriptorIndex | None = None,
    notes: list[str] | None = None,
) -> OriginalityScore:
    """Distance attributed to one design.

    ``parent-min``: minimum distance to its parents. ``nearest-neighbor``:
    minimum distance to any other design, restricted to strictly earlier
    timestamps when those are known. ``hybrid``: parent-min for Inherited
    designs, nearest-neighbor for Standalone ones.

    Raises:
        NoDescriptor: the design (or, in parent-min mode, every parent) lacks a descriptor.
        NoParents: parent-min requested for a Standalone design.
        SingletonCorpus: fewer than two descriptors exist.
    """
    mode = OriginalityMode(mode)
    notes = [] if notes is None else notes
    if design_id not in descriptors:
        raise NoDescriptor(design_id)
    if len(descriptors) < 2:
        raise SingletonCorpus()

    parents = graph.parents(design_id) if design_id in graph else []
    if mode is OriginalityMode.PARENT_MIN and not parents:
        raise NoParents(design_id)

    if parents and mode is not OriginalityMode.NEAREST_NEIGHBOR:
        scored = [p for p in parents if p in descriptors]
        if scored:
            distance = min(descriptor_distance(descriptors[design_id], descriptors[p], metric) for p in scored)
            return OriginalityScore(design_id, distance, OriginalityMode.PARENT_MIN)
        if mode is OriginalityMode.PARENT_MIN:
            raise NoDescriptor(parents[0])
        notes.append(f"{design_id}: no parent has a descriptor; scored by nearest neighbour")

    if index is None:
        index = DescriptorIndex(descriptors, timestamps, metric)
    return OriginalityScore(design_id, _nearest(design_id, index, notes), OriginalityMode.NEAREST_NEIGHBOR)


def score_designs(
    design_ids: Sequence[str],
    descriptors: Mapping[str, ShapeDescriptor],
    graph: RemixGraph,
    mode: OriginalityMode | str = OriginalityMode.HYBRID,
    timestamps: Mapping[str, int] | None = None,
    metric: Metric = "l2",
    jobs: int = 1,
) -> ScoringResult:
    """Score many designs over one shared index; output order follows ``design_ids``."""
    if len(descriptors) < 2:
        raise SingletonCorpus()
    index = DescriptorIndex(descriptors, timestamps, metric)

    def score_one(design_id: str) -> tuple[OriginalityScore, list[str]]:
        local: list[str] = []
        score = originality_score(design_id, descriptors, graph, mode, timestamps, metric, index=index, notes=local)
        return score, local

    result = ScoringResult(scores=[])
    for score, local in ordered_map(score_one, list(design_ids), max_workers=jobs):
        result.scores.append(score)
        result.notes.extend(local)
    for note in result.notes:
        logger.debug(note)
    return result


def partition_by_mean(scores: Sequence[OriginalityScore]) -> OriginalityPartition:
    """Split at the arithmetic mean: strictly above is original, ties go imitative."""
    if len(scores) < 2:
        raise TooFewScores(len(scores))
    distances = [score.distance for score in scores]
    # mean of the exact sum, kept inside the observed range against rounding
    threshold = min(max(math.fsum(distances) / len(distances), min(distances)), max(distances))
    original = sorted(score.design_id for score in scores if score.distance > threshold)
    imitative = sorted(score.design_id for score in scores if not score.distance > threshold)
    return OriginalityPartition(threshold=threshold, original_ids=tuple(original), imitative_ids=tuple(imitative))


def partition_agreement(partition: OriginalityPartition, truth: Mapping[str, str]) -> float:
    """Fraction of partitioned designs whose label matches ``truth``."""
    labelled = [design_id for design_id in (*partition.original_ids, *partition.imitative_ids) if design_id in truth]
    if not labelled:
        return 0.0
    hits = sum(partition.label(design_id) == truth[design_id] for design_id in labelled)
    return hits / len(labelled)
