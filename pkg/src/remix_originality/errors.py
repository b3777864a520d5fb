"""Exception hierarchy for the remix originality pipeline.

Every failure a caller is expected to handle is a subclass of
``RemixOriginalityError``; offending values are kept as attributes so the
CLI and the tests can inspect them without parsing messages.
"""

from __future__ import annotations


class RemixOriginalityError(Exception):
    """Base class for all typed errors raised by this package."""


class DomainError(RemixOriginalityError, ValueError):
    """Argument outside the mathematical domain of a numerical function."""


# ---------------------------------------------------------------------------
# mesh_io
# ---------------------------------------------------------------------------


class MeshError(RemixOriginalityError):
    """Problem reading or transforming a triangle mesh."""


class TruncatedFile(MeshError):
    def __init__(self, declared: int, available: int, detail: str | None = None):
        super().__init__(
            detail or f"binary STL declares {declared} triangles but only {available} complete records are present"
        )
        self.declared = declared
        self.available = available


class MalformedAscii(MeshError):
    def __init__(self, detail: str, token_index: int | None = None):
        where = f" at token {token_index}" if token_index is not None else ""
        super().__init__(f"malformed ASCII STL{where}: {detail}")
        self.detail = detail
        self.token_index = token_index


class EmptyMesh(MeshError):
    def __init__(self, source_id: str = ""):
        super().__init__(f"mesh {source_id!r} contains no triangles")
        self.source_id = source_id


class NonFiniteGeometry(MeshError):
    def __init__(self, source_id: str = ""):
        super().__init__(f"mesh {source_id!r} has non-finite vertex coordinates")
        self.source_id = source_id


class ZeroArea(MeshError):
    def __init__(self, source_id: str = ""):
        super().__init__(f"mesh {source_id!r} has zero total surface area")
        self.source_id = source_id


class NonOrthonormalRotation(MeshError):
    def __init__(self, deviation: float):
        super().__init__(f"rotation matrix is not orthonormal (max |RᵀR - I| = {deviation:.3e})")
        self.deviation = deviation


# ---------------------------------------------------------------------------
# sampling / harmonics
# ---------------------------------------------------------------------------


class SamplingError(RemixOriginalityError):
    """Problem turning a mesh into grid samples."""


class DegenerateShape(SamplingError):
    def __init__(self):
        super().__init__("all sample points coincide; mean radius is zero")


class RadiusOutOfRange(SamplingError):
    def __init__(self, radius_index: int, radii: int):
        super().__init__(f"radius index {radius_index} outside [1, {radii}]")
        self.radius_index = radius_index
        self.radii = radii


class HarmonicsError(RemixOriginalityError):
    """Problem in spherical-harmonic analysis or descriptor comparison."""


class BandwidthTooLow(HarmonicsError):
    def __init__(self, bandwidth: int, max_degree: int):
        super().__init__(f"bandwidth B={bandwidth} must be at least L+1={max_degree + 1}")
        self.bandwidth = bandwidth
        self.max_degree = max_degree


class IncompatibleParams(HarmonicsError):
    def __init__(self, left: object, right: object):
        super().__init__(f"descriptors computed with different parameters: {left} vs {right}")
        self.left = left
        self.right = right


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------


class CorpusError(RemixOriginalityError):
    """Problem with design metadata, the remix graph or descriptor caches."""


class ConfigError(CorpusError, ValueError):
    """Invalid run or synthesis configuration."""


class BadHeader(CorpusError):
    def __init__(self, found: list[str], expected: list[str]):
        super().__init__(f"metadata header {','.join(found)!r} does not match {','.join(expected)!r}")
        self.found = found
        self.expected = expected


class RowParseError(CorpusError):
    def __init__(self, line: int, detail: str):
        super().__init__(f"metadata line {line}: {detail}")
        self.line = line
        self.detail = detail


class DuplicateId(CorpusError):
    def __init__(self, design_id: str):
        super().__init__(f"duplicate design id {design_id!r}")
        self.design_id = design_id


class CycleDetected(CorpusError):
    def __init__(self, cycle: list[str]):
        super().__init__("remix graph contains a cycle: " + " -> ".join([*cycle, cycle[0]]))
        self.cycle = cycle


class BadMagic(CorpusError):
    def __init__(self, header: str):
        super().__init__(f"unrecognised descriptor cache header: {header!r}")
        self.header = header


class ParamMismatch(CorpusError):
    def __init__(self, expected: object, found: object):
        super().__init__(f"descriptor parameters differ: expected {expected}, found {found}")
        self.expected = expected
        self.found = found


class RaggedRow(CorpusError):
    def __init__(self, line: int, expected: int, found: int):
        super().__init__(f"descriptor cache line {line}: expected {expected} values, found {found}")
        self.line = line
        self.expected = expected
        self.found = found


# ---------------------------------------------------------------------------
# stats / analysis
# ---------------------------------------------------------------------------


class StatsError(RemixOriginalityError):
    """Problem computing a summary statistic or test."""


class TooFewValues(StatsError):
    def __init__(self, count: int):
        super().__init__(f"need at least 2 values, got {count}")
        self.count = count


class ZeroStandardError(StatsError):
    def __init__(self):
        super().__init__("both groups have zero variance; the t statistic is undefined")


class ConvergenceError(StatsError):
    def __init__(self, what: str):
        super().__init__(f"{what} did not converge")


class AnalysisError(RemixOriginalityError):
    """Problem scoring originality or running a comparison."""


class NoDescriptor(AnalysisError):
    def __init__(self, design_id: str):
        super().__init__(f"no descriptor for design {design_id!r}")
        self.design_id = design_id


class NoParents(AnalysisError):
    def __init__(self, design_id: str):
        super().__init__(f"design {design_id!r} is Standalone; parent-min scoring needs parents")
        self.design_id = design_id


class SingletonCorpus(AnalysisError):
    def __init__(self):
        super().__init__("originality needs at least 2 designs with descriptors")


class TooFewScores(AnalysisError):
    def __init__(self, count: int):
        super().__init__(f"partition needs at least 2 scores, got {count}")
        self.count = count


class EmptyGroup(AnalysisError):
    def __init__(self, comparison: str, group: str, size: int):
        super().__init__(f"{comparison}: group {group!r} has {size} design(s); at least 2 required")
        self.comparison = comparison
        self.group = group
        self.size = size
