"""Hull geometry: ellipsoid base mesh, deformation cage, feature extraction, mesh I/O."""

from .cage import DeformationCage, bernstein_basis, bind_cage, deform, interpolate
from .mesh import (
    MeshFeatures,
    TriMesh,
    is_watertight,
    make_ellipsoid,
    mesh_features,
    signed_volume,
    surface_area,
)
from .meshio import read_obj, write_obj, write_stl

__all__ = [
    "DeformationCage",
    "MeshFeatures",
    "TriMesh",
    "bernstein_basis",
    "bind_cage",
    "deform",
    "interpolate",
    "is_watertight",
    "make_ellipsoid",
    "mesh_features",
    "read_obj",
    "signed_volume",
    "surface_area",
    "write_obj",
    "write_stl",
]
