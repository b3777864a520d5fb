"""The remix graph: parent -> child inheritance edges between designs."""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass, field
from enum import Enum

import networkx as nx

from ..errors import CycleDetected, DuplicateId
from .metadata import DesignRecord

logger = logging.getLogger(__name__)


class InheritanceClass(str, Enum):
    STANDALONE = "Standalone"
    INHERITED = "Inherited"


@dataclass(frozen=True)
class DanglingParent:
    """A declared parent id that is not present in the corpus."""

    child: str
    parent: str

    def __str__(self) -> str:
        return f"DanglingParent({self.child}, {self.parent}): parent not in corpus, edge dropped"


class RemixGraph:
    """Validated, acyclic remix graph backed by ``networkx.DiGraph``.

    Nodes carry their ``DesignRecord`` under the ``record`` attribute.
    Treat instances as immutable once built.
    """

    def __init__(self, graph: nx.DiGraph):
        self._graph = graph

    @property
    def nx_graph(self) -> nx.DiGraph:
        return self._graph

    def __contains__(self, design_id: object) -> bool:
        return design_id in self._graph

    def __len__(self) -> int:
        return self._graph.number_of_nodes()

    @property
    def ids(self) -> list[str]:
        return list(self._graph.nodes)

    @property
    def edges(self) -> list[tuple[str, str]]:
        return list(self._graph.edges)

    def record(self, design_id: str) -> DesignRecord:
        return self._graph.nodes[design_id]["record"]

    def records(self) -> list[DesignRecord]:
        return [data["record"] for _, data in self._graph.nodes(data=True)]

    def parents(self, design_id: str) -> list[str]:
        return sorted(self._graph.predecessors(design_id))

    def children(self, design_id: str) -> list[str]:
        return sorted(self._graph.successors(design_id))

    def in_degree(self, design_id: str) -> int:
        return int(self._graph.in_degree(design_id))

    def timestamps(self) -> dict[str, int]:
        return {
            design_id: data["record"].timestamp
            for design_id, data in self._graph.nodes(data=True)
            if data["record"].timestamp is not None
        }


@dataclass
class GraphBuildResult:
    graph: RemixGraph
    warnings: list[DanglingParent] = field(default_factory=list)

    def __iter__(self):
        return iter((self.graph, self.warnings))


def build_graph(records: Iterable[DesignRecord]) -> GraphBuildResult:
    """Add an edge from every existing parent to its child.

    Parents absent from the corpus are dropped with a ``DanglingParent``
    warning, which can leave the child Standalone.

    Raises:
        DuplicateId: two records share an id.
        CycleDetected: the edges contain a cycle; one cycle is reported.
    """
    records = list(records)
    graph = nx.DiGraph()
    for record in records:
        if record.id in graph:
            raise DuplicateId(record.id)
        graph.add_node(record.id, record=record)

    warnings: list[DanglingParent] = []
    for record in records:
        for parent in record.parent_ids:
            if parent in graph:
                graph.add_edge(parent, record.id)
            else:
                warning = DanglingParent(child=record.id, parent=parent)
                logger.warning(str(warning))
                warnings.append(warning)

    if not nx.is_directed_acyclic_graph(graph):
        cycle_edges = nx.find_cycle(graph)
        raise CycleDetected([u for u, _ in cycle_edges])
    return GraphBuildResult(graph=RemixGraph(graph), warnings=warnings)


def classify(graph: RemixGraph) -> dict[str, InheritanceClass]:
    """Standalone iff the design has no (surviving) parent edge."""
    return {
        design_id: InheritanceClass.INHERITED if graph.in_degree(design_id) > 0 else InheritanceClass.STANDALONE
        for design_id in graph.ids
    }
