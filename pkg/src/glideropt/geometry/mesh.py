"""Triangle-mesh primitives: ellipsoid generation and hull feature extraction.

All meshes are plain vertex/face arrays.  Every function here is a pure
function of its inputs; nothing mutates a mesh in place.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidGeometryError

# Fixed resolutions for feature extraction.  These are part of the feature
# definition (changing them changes the labels a dataset gets), so they are
# constants rather than knobs.
DIAMETER_SLICES = 64
PLANFORM_RESOLUTION = 256


@dataclass(frozen=True)
class TriMesh:
    """Watertight triangle mesh, counterclockwise-outward faces, units meters."""

    vertices: np.ndarray  # (V, 3) float64
    faces: np.ndarray     # (F, 3) int64

    def __post_init__(self):
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=np.float64))
        object.__setattr__(self, "faces", np.asarray(self.faces, dtype=np.int64))
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise ValueError(f"vertices must be (V, 3), got {self.vertices.shape}")
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise ValueError(f"faces must be (F, 3), got {self.faces.shape}")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)


@dataclass(frozen=True)
class MeshFeatures:
    """Scalar hull descriptors consumed by the hydrodynamic model."""

    volume: float          # m^3, signed volume (positive for valid hulls)
    wetted_area: float     # m^2, total triangle area
    length: float          # m, x extent
    max_diameter: float    # m, max of y/z cross-section extents over x-slices
    planform_area: float   # m^2, area of the projection onto the x-y plane
    span: float            # m, y extent
    ref_area: float        # m^2, volume^(2/3)

    def as_dict(self) -> dict[str, float]:
        return {
            "volume": self.volume,
            "wetted_area": self.wetted_area,
            "length": self.length,
            "max_diameter": self.max_diameter,
            "planform_area": self.planform_area,
            "span": self.span,
            "ref_area": self.ref_area,
        }


def signed_volume(mesh: TriMesh) -> float:
    """Signed enclosed volume via the divergence theorem.

    Positive for counterclockwise-outward watertight meshes.
    """
    tri = mesh.vertices[mesh.faces]  # (F, 3, 3)
    return float(np.einsum("ij,ij->", tri[:, 0], np.cross(tri[:, 1], tri[:, 2])) / 6.0)


def surface_area(mesh: TriMesh) -> float:
    tri = mesh.vertices[mesh.faces]
    cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    return float(0.5 * np.linalg.norm(cross, axis=1).sum())


def is_watertight(mesh: TriMesh) -> bool:
    """True if the mesh is closed, 2-manifold, and consistently oriented.

    Checks that every directed edge appears exactly once and that its
    reversal also appears (each undirected edge shared by exactly two
    faces with opposite directions).
    """
    f = mesh.faces
    if len(f) == 0:
        return False
    if f.min() < 0 or f.max() >= mesh.n_vertices:
        return False
    de = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
    if np.any(de[:, 0] == de[:, 1]):  # degenerate face with a repeated vertex
        return False
    key = de[:, 0] * np.int64(mesh.n_vertices) + de[:, 1]
    if len(np.unique(key)) != len(key):
        return False
    rev = de[:, 1] * np.int64(mesh.n_vertices) + de[:, 0]
    return np.array_equal(np.sort(key), np.sort(rev))


# Icosahedron with CCW-outward faces; vertices get normalized to the unit
# sphere in make_ellipsoid.
_ICO_T = (1.0 + np.sqrt(5.0)) / 2.0
_ICO_VERTICES = np.array(
    [
        [-1, _ICO_T, 0], [1, _ICO_T, 0], [-1, -_ICO_T, 0], [1, -_ICO_T, 0],
        [0, -1, _ICO_T], [0, 1, _ICO_T], [0, -1, -_ICO_T], [0, 1, -_ICO_T],
        [_ICO_T, 0, -1], [_ICO_T, 0, 1], [-_ICO_T, 0, -1], [-_ICO_T, 0, 1],
    ],
    dtype=np.float64,
)
_ICO_FACES = np.array(
    [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ],
    dtype=np.int64,
)


def make_ellipsoid(a: float, b: float, c: float, subdivisions: int = 4) -> TriMesh:
    """Icosphere scaled per-axis to semi-axes (a, b, c).

    Each subdivision splits every face into four by edge midpoints and
    reprojects new vertices onto the unit sphere before scaling, so the
    vertex set always lies exactly on the target ellipsoid.
    """
    if a <= 0 or b <= 0 or c <= 0:
        raise ValueError(f"semi-axes must be positive, got ({a}, {b}, {c})")
    if subdivisions < 0:
        raise ValueError(f"subdivisions must be >= 0, got {subdivisions}")

    vertices = _ICO_VERTICES / np.linalg.norm(_ICO_VERTICES, axis=1, keepdims=True)
    faces = _ICO_FACES
    for _ in range(subdivisions):
        vertices, faces = _subdivide_on_sphere(vertices, faces)

    scaled = vertices * np.array([a, b, c], dtype=np.float64)
    return TriMesh(scaled, faces)


def _subdivide_on_sphere(vertices: np.ndarray, faces: np.ndarray):
    """One midpoint subdivision with reprojection onto the unit sphere."""
    verts = list(vertices)
    midpoint: dict[tuple[int, int], int] = {}

    def mid(i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        idx = midpoint.get(key)
        if idx is None:
            m = verts[i] + verts[j]
            m /= np.linalg.norm(m)
            idx = len(verts)
            verts.append(m)
            midpoint[key] = idx
        return idx

    new_faces = np.empty((4 * len(faces), 3), dtype=np.int64)
    for n, (i, j, k) in enumerate(faces):
        ij, jk, ki = mid(i, j), mid(j, k), mid(k, i)
        new_faces[4 * n:4 * n + 4] = [[i, ij, ki], [j, jk, ij], [k, ki, jk], [ij, jk, ki]]
    return np.array(verts), new_faces


def mesh_features(mesh: TriMesh) -> MeshFeatures:
    """Extract the scalar hull descriptors used by the hydrodynamic model.

    Raises InvalidGeometryError for non-watertight or non-positive-volume
    input; the features are meaningless in that case.
    """
    if not is_watertight(mesh):
        raise InvalidGeometryError("mesh is not watertight")
    volume = signed_volume(mesh)
    if volume <= 0:
        raise InvalidGeometryError(f"mesh has non-positive signed volume {volume:.3e}")

    lo = mesh.vertices.min(axis=0)
    hi = mesh.vertices.max(axis=0)
    extent = hi - lo
    if np.any(extent <= 0):
        raise InvalidGeometryError(f"mesh has a zero extent along an axis: {extent}")

    return MeshFeatures(
        volume=volume,
        wetted_area=surface_area(mesh),
        length=float(extent[0]),
        max_diameter=_max_cross_extent(mesh),
        planform_area=_planform_area(mesh),
        span=float(extent[1]),
        ref_area=float(volume ** (2.0 / 3.0)),
    )


def _max_cross_extent(mesh: TriMesh) -> float:
    """Max of y/z extents of plane cross-sections at uniform x stations.

    Stations sit at slice centers, (i + 1/2)/N of the x range, so all of
    them cut the interior of the hull.  Intersections of every mesh edge
    with every station plane are computed in one broadcast.
    """
    v = mesh.vertices
    xmin, xmax = v[:, 0].min(), v[:, 0].max()
    stations = xmin + (np.arange(DIAMETER_SLICES) + 0.5) / DIAMETER_SLICES * (xmax - xmin)

    step = (xmax - xmin) / DIAMETER_SLICES

    tri = v[mesh.faces]
    p0 = tri[:, [0, 1, 2], :].reshape(-1, 3)
    p1 = tri[:, [1, 2, 0], :].reshape(-1, 3)
    dx = p1[:, 0] - p0[:, 0]

    # station index range each edge's x-interval covers
    e_lo = np.minimum(p0[:, 0], p1[:, 0])
    e_hi = np.maximum(p0[:, 0], p1[:, 0])
    i_lo = np.clip(np.ceil((e_lo - xmin) / step - 0.5).astype(np.int64), 0, DIAMETER_SLICES - 1)
    i_hi = np.clip(np.floor((e_hi - xmin) / step - 0.5).astype(np.int64), -1, DIAMETER_SLICES - 1)
    counts = np.clip(i_hi - i_lo + 1, 0, None)
    counts[dx == 0.0] = 0  # x-parallel planes never transversally cut these

    total = int(counts.sum())
    if total == 0:
        return 0.0
    edge_of = np.repeat(np.arange(len(dx)), counts)
    run_start = np.repeat(np.cumsum(counts) - counts, counts)
    station_of = np.repeat(i_lo, counts) + (np.arange(total) - run_start)

    t = (stations[station_of] - p0[edge_of, 0]) / dx[edge_of]
    t = np.clip(t, 0.0, 1.0)
    y = p0[edge_of, 1] + t * (p1[edge_of, 1] - p0[edge_of, 1])
    z = p0[edge_of, 2] + t * (p1[edge_of, 2] - p0[edge_of, 2])

    y_min = np.full(DIAMETER_SLICES, np.inf)
    y_max = np.full(DIAMETER_SLICES, -np.inf)
    z_min = np.full(DIAMETER_SLICES, np.inf)
    z_max = np.full(DIAMETER_SLICES, -np.inf)
    np.minimum.at(y_min, station_of, y)
    np.maximum.at(y_max, station_of, y)
    np.minimum.at(z_min, station_of, z)
    np.maximum.at(z_max, station_of, z)

    ext = np.maximum(y_max - y_min, z_max - z_min)
    ext = ext[np.isfinite(ext)]
    return float(ext.max()) if len(ext) else 0.0


def _planform_area(mesh: TriMesh) -> float:
    """Area of the x-y projection, by rasterizing the union of projected faces.

    Marks every grid cell whose center lies inside at least one projected
    triangle (scanline intervals accumulated into a difference array), then
    counts covered cells.  Center sampling at PLANFORM_RESOLUTION² is well
    inside the 2% tolerance the downstream model needs.
    """
    res = PLANFORM_RESOLUTION
    pts = mesh.vertices[:, :2]
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = hi - lo
    if span[0] <= 0 or span[1] <= 0:
        raise InvalidGeometryError("projection onto the x-y plane is degenerate")
    hx = span[0] / res
    hy = span[1] / res

    tri = pts[mesh.faces]  # (F, 3, 2)
    ty_min = tri[:, :, 1].min(axis=1)
    ty_max = tri[:, :, 1].max(axis=1)
    # rows whose center line y = lo_y + (r + 1/2) hy crosses the triangle
    r_lo = np.ceil((ty_min - lo[1]) / hy - 0.5).astype(np.int64)
    r_hi = np.floor((ty_max - lo[1]) / hy - 0.5).astype(np.int64)
    r_lo = np.clip(r_lo, 0, res - 1)
    r_hi = np.clip(r_hi, -1, res - 1)
    counts = np.clip(r_hi - r_lo + 1, 0, None)

    total = int(counts.sum())
    if total == 0:
        return 0.0
    face_of_pair = np.repeat(np.arange(len(tri)), counts)
    run_start = np.repeat(np.cumsum(counts) - counts, counts)
    rows = np.repeat(r_lo, counts) + (np.arange(total) - run_start)
    yc = lo[1] + (rows + 0.5) * hy

    # x-interval of each triangle along its row's center line: intersect the
    # three edges with y = yc and take the min/max of the hit points
    t3 = tri[face_of_pair]               # (P, 3, 2)
    pa = t3[:, [0, 1, 2], :]             # edge starts
    pb = t3[:, [1, 2, 0], :]             # edge ends
    dy = pb[:, :, 1] - pa[:, :, 1]
    safe_dy = np.where(dy == 0.0, 1.0, dy)
    s = (yc[:, None] - pa[:, :, 1]) / safe_dy
    valid = (dy != 0.0) & (s >= 0.0) & (s <= 1.0)
    x_at = pa[:, :, 0] + s * (pb[:, :, 0] - pa[:, :, 0])
    # horizontal edges lying exactly on the center line contribute both ends
    on_line = (dy == 0.0) & (pa[:, :, 1] == yc[:, None])
    x_lo = np.where(valid | on_line, np.where(on_line, np.minimum(pa[:, :, 0], pb[:, :, 0]), x_at), np.inf).min(axis=1)
    x_hi = np.where(valid | on_line, np.where(on_line, np.maximum(pa[:, :, 0], pb[:, :, 0]), x_at), -np.inf).max(axis=1)

    has_span = x_lo <= x_hi
    c_lo = np.ceil((x_lo[has_span] - lo[0]) / hx - 0.5).astype(np.int64)
    c_hi = np.floor((x_hi[has_span] - lo[0]) / hx - 0.5).astype(np.int64)
    c_lo = np.clip(c_lo, 0, res - 1)
    c_hi = np.clip(c_hi, -1, res - 1)
    rows_ok = rows[has_span]
    nonempty = c_hi >= c_lo

    diff = np.zeros((res, res + 1), dtype=np.int64)
    np.add.at(diff, (rows_ok[nonempty], c_lo[nonempty]), 1)
    np.add.at(diff, (rows_ok[nonempty], c_hi[nonempty] + 1), -1)
    covered = np.cumsum(diff[:, :res], axis=1) > 0
    return float(covered.sum()) * hx * hy
