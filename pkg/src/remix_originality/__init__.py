"""Originality of 3D designs in a remix network.

Rotation-invariant spherical-harmonic shape descriptors, originality scores
over the remix graph, and Welch t-tests of originality and inheritance
against likes and makes.
"""

from .harmonics import DescriptorParams, ShapeDescriptor, describe_mesh, descriptor_distance
from .mesh_io import TriangleMesh, parse_stl, read_stl, serialize_stl, write_stl
from .stats import GroupSummary, WelchResult, summarize, welch_test

__version__ = "0.1.0"

__all__ = [
    "DescriptorParams",
    "GroupSummary",
    "ShapeDescriptor",
    "TriangleMesh",
    "WelchResult",
    "describe_mesh",
    "descriptor_distance",
    "parse_stl",
    "read_stl",
    "serialize_stl",
    "summarize",
    "welch_test",
    "write_stl",
]
