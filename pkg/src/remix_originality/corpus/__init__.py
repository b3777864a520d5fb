"""Design metadata, the remix graph, descriptor caches and synthetic corpora."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .descriptor_cache import (
    load_descriptors,
    merge_descriptor_maps,
    read_descriptor_cache,
    save_descriptors,
    write_descriptor_cache,
)
from .graph import DanglingParent, GraphBuildResult, InheritanceClass, RemixGraph, build_graph, classify
from .metadata import METADATA_COLUMNS, DesignRecord, load_metadata, read_metadata, write_metadata
from .synthetic import SynthConfig, SyntheticCorpus, generate_synthetic, load_truth, plan_synthetic

METADATA_FILE = "metadata.csv"


@dataclass
class Corpus:
    """Records plus their validated remix graph, rooted at ``directory``."""

    directory: Path
    records: list[DesignRecord]
    graph: RemixGraph
    warnings: list[DanglingParent] = field(default_factory=list)

    def mesh_path(self, record: DesignRecord) -> Path:
        path = Path(record.mesh_path)
        return path if path.is_absolute() else self.directory / path


def corpus_from_records(records: list[DesignRecord], directory: str | Path = ".") -> Corpus:
    result = build_graph(records)
    return Corpus(directory=Path(directory), records=records, graph=result.graph, warnings=result.warnings)


def load_corpus(directory: str | Path, metadata_file: str = METADATA_FILE) -> Corpus:
    """Load ``<directory>/metadata.csv`` and build the remix graph."""
    directory = Path(directory)
    return corpus_from_records(read_metadata(directory / metadata_file), directory)


__all__ = [
    "METADATA_COLUMNS",
    "Corpus",
    "DanglingParent",
    "DesignRecord",
    "GraphBuildResult",
    "InheritanceClass",
    "RemixGraph",
    "SynthConfig",
    "SyntheticCorpus",
    "build_graph",
    "classify",
    "corpus_from_records",
    "generate_synthetic",
    "load_corpus",
    "load_descriptors",
    "load_metadata",
    "load_truth",
    "merge_descriptor_maps",
    "plan_synthetic",
    "read_descriptor_cache",
    "read_metadata",
    "save_descriptors",
    "write_descriptor_cache",
    "write_metadata",
]
