"""Lattice deformation cage: trivariate-Bernstein free-form deformation.

A cage is an axis-aligned box of control points wrapped around a mesh.
Each mesh vertex is bound once with Bernstein weights of its normalized
box coordinates; deforming is then a single weighted sum over displaced
control points.  Weights are a partition of unity, so zero offsets give
the identity map and a uniform offset translates the whole mesh.

Cage parameters ("handle offsets") are flat float vectors of length
3 * nx * ny * nz, ordered control-point-major with xyz fastest.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from ..errors import DegenerateShapeError, InvalidGeometryError
from .mesh import TriMesh, signed_volume


@dataclass(frozen=True)
class DeformationCage:
    """FFD lattice bound to a specific mesh."""

    dims: tuple[int, int, int]       # control points per axis (nx, ny, nz)
    rest_positions: np.ndarray       # (n_control, 3) lattice points at rest
    weights: np.ndarray              # (n_vertices, n_control) Bernstein binding

    @property
    def n_control(self) -> int:
        return self.rest_positions.shape[0]

    @property
    def n_params(self) -> int:
        return 3 * self.n_control

    def zero_params(self) -> np.ndarray:
        return np.zeros(self.n_params, dtype=np.float64)


def bernstein_basis(degree: int, t: np.ndarray) -> np.ndarray:
    """Rows of Bernstein basis values: out[s, i] = C(n,i) t_s^i (1-t_s)^(n-i)."""
    t = np.asarray(t, dtype=np.float64)[:, None]
    i = np.arange(degree + 1)
    coeff = np.array([comb(degree, k) for k in range(degree + 1)], dtype=np.float64)
    return coeff * t ** i * (1.0 - t) ** (degree - i)


def bind_cage(mesh: TriMesh, nx: int, ny: int, nz: int, margin: float = 0.05) -> DeformationCage:
    """Wrap a lattice box around the mesh and bind every vertex to it.

    The box is the mesh bounding box grown by `margin` of the extent on
    each side of each axis.  Binding weights are products of per-axis
    Bernstein basis values of the vertex's normalized box coordinates.
    """
    if min(nx, ny, nz) < 2:
        raise ValueError(f"cage needs at least 2 control points per axis, got ({nx}, {ny}, {nz})")
    if margin < 0:
        raise ValueError(f"margin must be non-negative, got {margin}")

    lo = mesh.vertices.min(axis=0)
    hi = mesh.vertices.max(axis=0)
    extent = hi - lo
    if np.any(extent <= 0):
        raise InvalidGeometryError(f"degenerate bounding box, extents {extent}")
    box_lo = lo - margin * extent
    box_hi = hi + margin * extent

    axes = [np.linspace(box_lo[d], box_hi[d], n) for d, n in enumerate((nx, ny, nz))]
    gx, gy, gz = np.meshgrid(*axes, indexing="ij")
    rest = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1)

    uvw = (mesh.vertices - box_lo) / (box_hi - box_lo)
    bu = bernstein_basis(nx - 1, uvw[:, 0])
    bv = bernstein_basis(ny - 1, uvw[:, 1])
    bw = bernstein_basis(nz - 1, uvw[:, 2])
    # weights[v, (i,j,k)] = bu[v,i] * bv[v,j] * bw[v,k], flattened like rest
    weights = np.einsum("vi,vj,vk->vijk", bu, bv, bw).reshape(mesh.n_vertices, -1)
    return DeformationCage((nx, ny, nz), rest, weights)


def deform(cage: DeformationCage, params: np.ndarray, mesh: TriMesh) -> TriMesh:
    """Apply handle offsets to the bound mesh.

    Raises DegenerateShapeError if the deformed mesh's signed volume is
    non-positive (the shape folded through itself).
    """
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (cage.n_params,):
        raise ValueError(f"expected {cage.n_params} cage parameters, got shape {params.shape}")
    if not np.all(np.isfinite(params)):
        raise ValueError("cage parameters must be finite")
    if cage.weights.shape[0] != mesh.n_vertices:
        raise ValueError(
            f"cage is bound to {cage.weights.shape[0]} vertices, mesh has {mesh.n_vertices}"
        )

    offsets = params.reshape(cage.n_control, 3)
    new_vertices = cage.weights @ (cage.rest_positions + offsets)
    deformed = TriMesh(new_vertices, mesh.faces)
    volume = signed_volume(deformed)
    if volume <= 0:
        raise DegenerateShapeError(f"deformation produced signed volume {volume:.3e}")
    return deformed


def interpolate(a: np.ndarray, b: np.ndarray, t: float) -> np.ndarray:
    """Componentwise (1-t) a + t b between two parameter vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"parameter shapes differ: {a.shape} vs {b.shape}")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"interpolation fraction must be in [0, 1], got {t}")
    return (1.0 - t) * a + t * b
