"""Mesh file I/O: ASCII OBJ (export/import) and binary STL (export).

OBJ floats are written with ``repr`` so round-trips are bit-exact and
re-exports of identical meshes produce identical bytes.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .mesh import TriMesh


def write_obj(mesh: TriMesh, path: str | Path) -> None:
    lines = []
    for v in mesh.vertices:
        lines.append(f"v {v[0]!r} {v[1]!r} {v[2]!r}")
    for f in mesh.faces:
        lines.append(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_obj(path: str | Path) -> TriMesh:
    """Parse `v`/`f` records; triangles only, 1-based indices."""
    vertices: list[list[float]] = []
    faces: list[list[int]] = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "v":
                vertices.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(p.split("/")[0]) for p in parts[1:]]
                if len(idx) != 3:
                    raise ValueError(f"face with {len(idx)} vertices (triangles only)")
                faces.append([i - 1 for i in idx])
        except (ValueError, IndexError) as exc:
            raise ValueError(f"{path}: parse error at line {lineno}: {raw!r}") from exc
    if not vertices or not faces:
        raise ValueError(f"{path}: no vertices or faces found")
    return TriMesh(np.array(vertices), np.array(faces))


def write_stl(mesh: TriMesh, path: str | Path, header: str = "glideropt hull") -> None:
    """Binary STL: 80-byte header, little-endian triangle records."""
    tri = mesh.vertices[mesh.faces].astype(np.float32)
    normals = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    norm = np.linalg.norm(normals, axis=1, keepdims=True)
    normals = np.where(norm > 0, normals / np.where(norm == 0, 1, norm), 0.0).astype(np.float32)

    with open(path, "wb") as fh:
        fh.write(header.encode("ascii")[:80].ljust(80, b"\0"))
        fh.write(struct.pack("<I", mesh.n_faces))
        record = np.empty((mesh.n_faces, 12), dtype="<f4")
        record[:, 0:3] = normals
        record[:, 3:12] = tri.reshape(mesh.n_faces, 9)
        raw = record.tobytes()
        # interleave the 2-byte attribute count after each 48-byte record
        out = bytearray()
        for i in range(mesh.n_faces):
            out += raw[48 * i:48 * (i + 1)]
            out += b"\0\0"
        fh.write(bytes(out))
