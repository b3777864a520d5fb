"""STL reading, writing and rigid transforms for triangle meshes.

Binary and ASCII STL are auto-detected. Stored facet normals are kept only for
inspection; every computation derives orientation from the vertex winding.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    EmptyMesh,
    MalformedAscii,
    NonFiniteGeometry,
    NonOrthonormalRotation,
    TruncatedFile,
    ZeroArea,
)

logger = logging.getLogger(__name__)

HEADER_BYTES = 80
RECORD_BYTES = 50
ORTHONORMAL_TOL = 1e-9

# normal(3) + v0(3) + v1(3) + v2(3) float32, uint16 attribute
_RECORD_DTYPE = np.dtype(
    [
        ("normal", "<f4", (3,)),
        ("vertices", "<f4", (3, 3)),
        ("attribute", "<u2"),
    ]
)
assert _RECORD_DTYPE.itemsize == RECORD_BYTES


@dataclass(frozen=True)
class Triangle:
    """One facet; ``normal`` is None when absent or not unit length."""

    v0: tuple[float, float, float]
    v1: tuple[float, float, float]
    v2: tuple[float, float, float]
    normal: tuple[float, float, float] | None = None


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Triangle soup in model units.

    ``vertices`` has shape (T, 3, 3): triangle, corner, coordinate.
    """

    vertices: np.ndarray
    source_id: str = ""
    stored_normals: np.ndarray | None = None

    def __post_init__(self) -> None:
        verts = np.asarray(self.vertices, dtype=np.float64)
        if verts.ndim != 3 or verts.shape[1:] != (3, 3):
            raise ValueError(f"vertices must have shape (T, 3, 3), got {verts.shape}")
        if verts.shape[0] == 0:
            raise EmptyMesh(self.source_id)
        if not np.all(np.isfinite(verts)):
            raise NonFiniteGeometry(self.source_id)
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)

        normals = self.stored_normals
        if normals is not None:
            normals = np.array(normals, dtype=np.float64).reshape(-1, 3)
            length = np.linalg.norm(normals, axis=1)
            usable = np.isfinite(length) & (length >= 0.99) & (length <= 1.01)
            normals[~usable] = np.nan
            normals.setflags(write=False)
            object.__setattr__(self, "stored_normals", normals)

    @classmethod
    def from_arrays(cls, points: np.ndarray, faces: np.ndarray, source_id: str = "") -> TriangleMesh:
        """Build a mesh from indexed geometry (vertex array + face index array)."""
        points = np.asarray(points, dtype=np.float64)
        faces = np.asarray(faces, dtype=np.int64)
        return cls(vertices=points[faces], source_id=source_id)

    def __len__(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def triangles(self) -> list[Triangle]:
        out: list[Triangle] = []
        for idx, tri in enumerate(self.vertices):
            normal = None
            if self.stored_normals is not None and not np.isnan(self.stored_normals[idx, 0]):
                normal = tuple(float(c) for c in self.stored_normals[idx])
            out.append(Triangle(*(tuple(float(c) for c in corner) for corner in tri), normal=normal))
        return out

    def cross_products(self) -> np.ndarray:
        v0, v1, v2 = self.vertices[:, 0], self.vertices[:, 1], self.vertices[:, 2]
        return np.cross(v1 - v0, v2 - v0)

    def triangle_areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(self.cross_products(), axis=1)

    def normals(self) -> np.ndarray:
        """Unit normals from winding; zero rows for degenerate triangles."""
        cross = self.cross_products()
        length = np.linalg.norm(cross, axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(length > 0, cross / np.where(length > 0, length, 1.0), 0.0)
        return unit


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _looks_ascii(data: bytes) -> bool:
    # binary headers sometimes start with "solid" too, so a facet keyword is required
    return data.lstrip()[:5].lower() == b"solid" and b"facet" in data


def _parse_binary(data: bytes, source_id: str) -> TriangleMesh:
    if len(data) < HEADER_BYTES + 4:
        raise TruncatedFile(declared=0, available=0, detail=f"{len(data)} bytes is shorter than a binary STL header")
    (count,) = struct.unpack_from("<I", data, HEADER_BYTES)
    body = len(data) - HEADER_BYTES - 4
    available = body // RECORD_BYTES
    if available < count:
        raise TruncatedFile(declared=count, available=available)
    if body != count * RECORD_BYTES:
        logger.warning(f"{source_id or 'STL'}: {body - count * RECORD_BYTES} trailing bytes ignored")
    if count == 0:
        raise EmptyMesh(source_id)
    records = np.frombuffer(data, dtype=_RECORD_DTYPE, count=count, offset=HEADER_BYTES + 4)
    return TriangleMesh(
        vertices=records["vertices"].astype(np.float64),
        source_id=source_id,
        stored_normals=records["normal"].astype(np.float64),
    )


def _parse_floats(tokens: list[str], start: int, count: int) -> list[float]:
    if start + count > len(tokens):
        raise MalformedAscii("unexpected end of file", start)
    values: list[float] = []
    for offset in range(count):
        try:
            values.append(float(tokens[start + offset]))
        except ValueError as exc:
            raise MalformedAscii(f"expected a number, got {tokens[start + offset]!r}", start + offset) from exc
    return values


def _expect(tokens: list[str], pos: int, *words: str) -> int:
    for word in words:
        if pos >= len(tokens):
            raise MalformedAscii(f"expected {word!r}, reached end of file", pos)
        if tokens[pos].lower() != word:
            raise MalformedAscii(f"expected {word!r}, got {tokens[pos]!r}", pos)
        pos += 1
    return pos


def _parse_ascii(data: bytes, source_id: str) -> TriangleMesh:
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise MalformedAscii("non-ASCII bytes in ASCII STL") from exc
    tokens = text.split()

    pos = _expect(tokens, 0, "solid")
    # solid name may span several tokens
    while pos < len(tokens) and tokens[pos].lower() not in {"facet", "endsolid"}:
        pos += 1

    normals: list[list[float]] = []
    triangles: list[list[list[float]]] = []
    while True:
        if pos >= len(tokens):
            raise MalformedAscii("missing 'endsolid'", pos)
        keyword = tokens[pos].lower()
        if keyword == "endsolid":
            break
        pos = _expect(tokens, pos, "facet", "normal")
        normals.append(_parse_floats(tokens, pos, 3))
        pos = _expect(tokens, pos + 3, "outer", "loop")
        corners = []
        for _ in range(3):
            pos = _expect(tokens, pos, "vertex")
            corners.append(_parse_floats(tokens, pos, 3))
            pos += 3
        pos = _expect(tokens, pos, "endloop", "endfacet")
        triangles.append(corners)

    if not triangles:
        raise EmptyMesh(source_id)
    return TriangleMesh(
        vertices=np.array(triangles, dtype=np.float64),
        source_id=source_id,
        stored_normals=np.array(normals, dtype=np.float64),
    )


def parse_stl(data: bytes, source_id: str = "") -> TriangleMesh:
    """Parse binary or ASCII STL bytes.

    Binary is chosen whenever the length matches the declared triangle count
    exactly; otherwise a ``solid`` prefix plus a ``facet`` token selects the
    ASCII grammar.

    Raises:
        TruncatedFile: fewer triangle records than the binary header declares.
        MalformedAscii: the ASCII token stream breaks the facet grammar.
        EmptyMesh: the file holds zero triangles.
        NonFiniteGeometry: a vertex coordinate is NaN or infinite.
    """
    if not data:
        raise EmptyMesh(source_id)
    if len(data) >= HEADER_BYTES + 4:
        (count,) = struct.unpack_from("<I", data, HEADER_BYTES)
        if len(data) == HEADER_BYTES + 4 + count * RECORD_BYTES:
            return _parse_binary(data, source_id)
    if _looks_ascii(data):
        return _parse_ascii(data, source_id)
    return _parse_binary(data, source_id)


def read_stl(path: str | Path) -> TriangleMesh:
    path = Path(path)
    return parse_stl(path.read_bytes(), source_id=path.stem)


def serialize_stl(mesh: TriangleMesh, header: bytes = b"") -> bytes:
    """Binary STL bytes; normals are recomputed from winding."""
    records = np.zeros(len(mesh), dtype=_RECORD_DTYPE)
    records["normal"] = mesh.normals().astype(np.float32)
    records["vertices"] = mesh.vertices.astype(np.float32)
    head = header[:HEADER_BYTES].ljust(HEADER_BYTES, b"\0")
    return head + struct.pack("<I", len(mesh)) + records.tobytes()


def write_stl(mesh: TriangleMesh, path: str | Path) -> None:
    Path(path).write_bytes(serialize_stl(mesh, header=f"remix-originality {mesh.source_id}".encode()))


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


def surface_area(mesh: TriangleMesh) -> float:
    return float(np.sum(mesh.triangle_areas()))


def area_centroid(mesh: TriangleMesh) -> np.ndarray:
    """Area-weighted mean of triangle centroids."""
    areas = mesh.triangle_areas()
    total = float(np.sum(areas))
    if total <= 0.0:
        raise ZeroArea(mesh.source_id)
    centroids = mesh.vertices.mean(axis=1)
    return (areas[:, None] * centroids).sum(axis=0) / total


def apply_rigid(mesh: TriangleMesh, rotation: np.ndarray, translation: np.ndarray | None = None) -> TriangleMesh:
    """Map every vertex v to R·v + t. Stored normals are dropped."""
    rotation = np.asarray(rotation, dtype=np.float64)
    if rotation.shape != (3, 3):
        raise NonOrthonormalRotation(float("inf"))
    deviation = float(np.max(np.abs(rotation.T @ rotation - np.eye(3))))
    if not deviation <= ORTHONORMAL_TOL:
        raise NonOrthonormalRotation(deviation)
    shift = np.zeros(3) if translation is None else np.asarray(translation, dtype=np.float64)
    moved = np.einsum("ij,tcj->tci", rotation, mesh.vertices) + shift
    return TriangleMesh(vertices=moved, source_id=mesh.source_id)


def scale_mesh(mesh: TriangleMesh, factors: float | np.ndarray) -> TriangleMesh:
    """Uniform or per-axis scaling about the origin."""
    factors = np.broadcast_to(np.asarray(factors, dtype=np.float64), (3,))
    return TriangleMesh(vertices=mesh.vertices * factors, source_id=mesh.source_id)
