"""Design metadata: the ``id,mesh_path,likes,makes,parents,timestamp`` CSV."""

from __future__ import annotations

import csv
import io
import logging
import re
from pathlib import Path

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import BadHeader, DuplicateId, RowParseError

logger = logging.getLogger(__name__)

METADATA_COLUMNS = ["id", "mesh_path", "likes", "makes", "parents", "timestamp"]
PARENT_SEPARATOR = ";"
# ids are the first field of descriptor cache rows
RESERVED_ID_CHARS = ",\r\n"

_COUNT_RE = re.compile(r"^\d+$")
_TIMESTAMP_RE = re.compile(r"^-?\d+$")


class DesignRecord(BaseModel):
    """One design: its mesh, outcome counts and declared parents."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(..., min_length=1)
    mesh_path: str
    likes: int = Field(..., ge=0)
    makes: int = Field(..., ge=0)
    parent_ids: list[str] = Field(default_factory=list)
    timestamp: int | None = None

    @model_validator(mode="after")
    def _no_self_parent(self) -> DesignRecord:
        if self.id in self.parent_ids:
            raise ValueError(f"design {self.id!r} lists itself as a parent")
        return self

    def to_row(self) -> dict[str, str]:
        return {
            "id": self.id,
            "mesh_path": self.mesh_path,
            "likes": str(self.likes),
            "makes": str(self.makes),
            "parents": PARENT_SEPARATOR.join(self.parent_ids),
            "timestamp": "" if self.timestamp is None else str(self.timestamp),
        }


def _cell(value: object) -> str:
    if value is None or (isinstance(value, float) and pd.isna(value)):
        return ""
    return str(value).strip()


def _parse_count(raw: str, field: str, line: int) -> int:
    if not _COUNT_RE.match(raw):
        raise RowParseError(line, f"{field} must be a non-negative integer, got {raw!r}")
    return int(raw)


def _parse_row(cells: list[str], line: int) -> DesignRecord:
    design_id, mesh_path, likes, makes, parents, timestamp = cells
    if not design_id:
        raise RowParseError(line, "empty id")
    if any(ch in design_id for ch in RESERVED_ID_CHARS):
        raise RowParseError(line, f"id {design_id!r} contains a comma or line break")
    parent_ids: list[str] = []
    for parent in parents.split(PARENT_SEPARATOR) if parents else []:
        parent = parent.strip()
        if parent and parent not in parent_ids:
            parent_ids.append(parent)
    if design_id in parent_ids:
        raise RowParseError(line, f"design {design_id!r} lists itself as a parent")
    if timestamp and not _TIMESTAMP_RE.match(timestamp):
        raise RowParseError(line, f"timestamp must be an integer, got {timestamp!r}")
    return DesignRecord(
        id=design_id,
        mesh_path=mesh_path,
        likes=_parse_count(likes, "likes", line),
        makes=_parse_count(makes, "makes", line),
        parent_ids=parent_ids,
        timestamp=int(timestamp) if timestamp else None,
    )


def load_metadata(data: bytes) -> list[DesignRecord]:
    """Parse metadata CSV bytes (RFC-4180 quoting) into records, in file order.

    Raises:
        BadHeader: the header row is not exactly ``METADATA_COLUMNS``.
        RowParseError: a data row cannot be parsed; carries the 1-based line.
        DuplicateId: two rows share an id.
    """
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise RowParseError(data[: exc.start].count(b"\n") + 1, "invalid UTF-8") from exc
    if not text.strip():
        raise BadHeader([], METADATA_COLUMNS)

    options = {"header": None, "dtype": str, "keep_default_na": False, "skip_blank_lines": False}
    head = pd.read_csv(io.StringIO(text), nrows=1, **options)
    header = [_cell(value) for value in head.iloc[0].tolist()]
    if header != METADATA_COLUMNS:
        raise BadHeader(header, METADATA_COLUMNS)

    # pandas pads short rows with empty cells
    reader = csv.reader(io.StringIO(text))
    for fields in reader:
        if any(cell.strip() for cell in fields) and len(fields) != len(METADATA_COLUMNS):
            raise RowParseError(reader.line_num, f"expected {len(METADATA_COLUMNS)} fields, got {len(fields)}")

    try:
        frame = pd.read_csv(io.StringIO(text), **options)
    except pd.errors.ParserError as exc:
        match = re.search(r"line (\d+)", str(exc))
        raise RowParseError(int(match.group(1)) if match else 0, "wrong number of fields") from exc

    records: list[DesignRecord] = []
    seen: set[str] = set()
    for position in range(1, len(frame)):
        cells = [_cell(value) for value in frame.iloc[position].tolist()]
        if not any(cells):
            continue
        record = _parse_row(cells, line=position + 1)
        if record.id in seen:
            raise DuplicateId(record.id)
        seen.add(record.id)
        records.append(record)
    logger.debug(f"loaded {len(records)} design records")
    return records


def read_metadata(path: str | Path) -> list[DesignRecord]:
    return load_metadata(Path(path).read_bytes())


def write_metadata(records: list[DesignRecord], path: str | Path) -> None:
    frame = pd.DataFrame([record.to_row() for record in records], columns=METADATA_COLUMNS)
    frame.to_csv(path, index=False, lineterminator="\n")
