"""Versioned text cache of shape descriptors.

Line 1: ``SHDESC 1 n=<n> R=<R> L=<L> B=<B> density=<d> seed=<s>``.
Then one row per design, sorted by id: ``<id>,<e[1][0]>,...,<e[R][L]>``
with 17 significant digits so floats round-trip bit-exactly.
"""

from __future__ import annotations

import io
import logging
from collections.abc import Mapping
from pathlib import Path
from typing import BinaryIO

import numpy as np
from pydantic import ValidationError

from ..errors import BadMagic, CorpusError, ParamMismatch, RaggedRow
from ..harmonics import DescriptorParams, ShapeDescriptor
from .metadata import RESERVED_ID_CHARS

logger = logging.getLogger(__name__)

MAGIC = "SHDESC"
VERSION = "1"

_HEADER_KEYS = {"n": "n", "R": "radii", "L": "max_degree", "B": "bandwidth", "density": "density", "seed": "seed"}


def format_header(params: DescriptorParams) -> str:
    return (
        f"{MAGIC} {VERSION} n={params.n} R={params.radii} L={params.max_degree} "
        f"B={params.bandwidth} density={params.density!r} seed={params.seed}"
    )


def parse_header(line: str) -> DescriptorParams:
    tokens = line.split()
    if len(tokens) < 2 or tokens[0] != MAGIC or tokens[1] != VERSION:
        raise BadMagic(line)
    fields: dict[str, str] = {}
    for token in tokens[2:]:
        key, sep, value = token.partition("=")
        if not sep or key not in _HEADER_KEYS or _HEADER_KEYS[key] in fields:
            raise BadMagic(line)
        fields[_HEADER_KEYS[key]] = value
    if set(fields) != set(_HEADER_KEYS.values()):
        raise BadMagic(line)
    try:
        return DescriptorParams(
            n=int(fields["n"]),
            radii=int(fields["radii"]),
            max_degree=int(fields["max_degree"]),
            bandwidth=int(fields["bandwidth"]),
            density=float(fields["density"]),
            seed=int(fields["seed"]),
        )
    except (ValueError, ValidationError) as exc:
        raise BadMagic(line) from exc


def common_params(descriptors: Mapping[str, ShapeDescriptor]) -> DescriptorParams | None:
    params: DescriptorParams | None = None
    for descriptor in descriptors.values():
        if params is None:
            params = descriptor.params
        elif descriptor.params != params:
            raise ParamMismatch(params, descriptor.params)
    return params


def dumps_descriptors(descriptors: Mapping[str, ShapeDescriptor], params: DescriptorParams | None = None) -> str:
    found = common_params(descriptors)
    if params is None:
        params = found
    elif found is not None and found != params:
        raise ParamMismatch(params, found)
    if params is None:
        raise CorpusError("cannot write an empty descriptor cache without parameters")

    lines = [format_header(params)]
    for design_id in sorted(descriptors):
        if not design_id or any(ch in design_id for ch in RESERVED_ID_CHARS):
            raise CorpusError(f"design id {design_id!r} cannot be stored in a descriptor cache")
        values = ",".join(format(float(v), ".17g") for v in descriptors[design_id].flat())
        lines.append(f"{design_id},{values}")
    return "\n".join(lines) + "\n"


def save_descriptors(
    descriptors: Mapping[str, ShapeDescriptor], out: BinaryIO, params: DescriptorParams | None = None
) -> None:
    out.write(dumps_descriptors(descriptors, params).encode("utf-8"))


def load_descriptors(source: BinaryIO) -> tuple[DescriptorParams, dict[str, ShapeDescriptor]]:
    """Read a cache; returns its parameters and the descriptor map.

    Raises:
        BadMagic: unknown magic/version or malformed header.
        RaggedRow: a row has the wrong number of values (or unparsable ones).
    """
    text = io.TextIOWrapper(source, encoding="utf-8", newline=None)
    header = text.readline().rstrip("\n")
    params = parse_header(header)
    width = params.radii * (params.max_degree + 1)

    descriptors: dict[str, ShapeDescriptor] = {}
    for line_no, line in enumerate(text, start=2):
        line = line.rstrip("\n")
        if not line:
            continue
        design_id, _, rest = line.partition(",")
        cells = rest.split(",") if rest else []
        if len(cells) != width:
            raise RaggedRow(line_no, width, len(cells))
        try:
            values = np.array([float(cell) for cell in cells], dtype=np.float64)
            descriptor = ShapeDescriptor(energies=values.reshape(params.shape), params=params)
        except ValueError as exc:
            raise RaggedRow(line_no, width, len(cells)) from exc
        if design_id in descriptors:
            raise CorpusError(f"descriptor cache line {line_no}: duplicate id {design_id!r}")
        descriptors[design_id] = descriptor
    text.detach()
    return params, descriptors


def write_descriptor_cache(
    path: str | Path, descriptors: Mapping[str, ShapeDescriptor], params: DescriptorParams | None = None
) -> None:
    Path(path).write_text(dumps_descriptors(descriptors, params), encoding="utf-8")


def read_descriptor_cache(path: str | Path) -> tuple[DescriptorParams, dict[str, ShapeDescriptor]]:
    with open(path, "rb") as handle:
        return load_descriptors(handle)


def merge_descriptor_maps(
    base: Mapping[str, ShapeDescriptor], extra: Mapping[str, ShapeDescriptor]
) -> dict[str, ShapeDescriptor]:
    """Union of two caches; entries of ``extra`` win. Parameters must agree."""
    left = common_params(base)
    right = common_params(extra)
    if left is not None and right is not None and left != right:
        raise ParamMismatch(left, right)
    merged = dict(base)
    merged.update(extra)
    return merged
