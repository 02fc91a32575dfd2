"""Design dataset: procedural base-shape family, morphs, labeling, serialization.

The base family stands in for a hand-curated shape collection: a fixed
library of parametric archetypes (slender torpedo, winged bodies with one
to four lateral bulges, a flattened ray, a deep-keeled body) realized as
deterministic cage-handle offsets plus seeded jitter.  Pairwise convex
interpolation between family members then densifies the design space, and
every shape is labeled by the analytic hydrodynamics model across a grid
of angles of attack.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DegenerateShapeError, GenerationError
from .geometry import DeformationCage, TriMesh, bind_cage, deform, interpolate, make_ellipsoid, mesh_features
from .hydro import AngleOfAttack, FlowConditions, oracle_coefficients

DEFAULT_SEMI_AXES = (1.1, 0.35, 0.22)  # meters, glider-scale hull
DEFAULT_SUBDIVISIONS = 4
DEFAULT_CAGE_DIMS = (4, 3, 3)
DEFAULT_MARGIN = 0.05
DEFAULT_JITTER_FRAC = 0.02            # of body length, per handle component
DEFAULT_AOAS_DEG = (-30.0, -15.0, 0.0, 15.0, 30.0)


@dataclass(frozen=True)
class BaseShapeFamily:
    """Named base-shape parameter vectors sharing one cage and base mesh."""

    names: list[str]
    params: np.ndarray            # (n_shapes, n_params)
    cage: DeformationCage
    base_mesh: TriMesh
    seed: int
    geometry_meta: dict = field(default_factory=dict)

    @property
    def n_shapes(self) -> int:
        return self.params.shape[0]

    def mesh_for(self, index: int) -> TriMesh:
        return deform(self.cage, self.params[index], self.base_mesh)


@dataclass(frozen=True)
class LabeledSample:
    sample_id: str
    shape_id: str
    params: np.ndarray
    aoa_deg: float
    cd: float
    cl: float
    provenance: dict


@dataclass(frozen=True)
class DatasetBuild:
    samples: list[LabeledSample]
    skipped_shapes: list[str]     # shape ids whose deformation degenerated

    @property
    def n_samples(self) -> int:
        return len(self.samples)


class _Lattice:
    """Index helper for a (nx, ny, nz) cage parameter vector."""

    def __init__(self, dims: tuple[int, int, int]):
        self.nx, self.ny, self.nz = dims
        self.n_params = 3 * self.nx * self.ny * self.nz

    def slot(self, i: int, j: int, k: int, axis: int) -> int:
        return 3 * ((i * self.ny + j) * self.nz + k) + axis

    def add(self, params: np.ndarray, i: int, j: int, k: int, vec: tuple[float, float, float]):
        for axis, value in enumerate(vec):
            if value != 0.0:
                params[self.slot(i, j, k, axis)] += value


def _archetype_patterns(lattice: _Lattice, half_extent: np.ndarray) -> list[tuple[str, np.ndarray]]:
    """Deterministic handle-offset pattern per archetype.

    Offsets are proportional to the hull's half extents so the family
    scales with the base ellipsoid.
    """
    hx, hy, hz = half_extent
    nx, ny, nz = lattice.nx, lattice.ny, lattice.nz
    mid_i = range(1, nx - 1)
    patterns: list[tuple[str, np.ndarray]] = []

    # slender torpedo: pull the sides in, stretch the nose and tail out
    p = np.zeros(lattice.n_params)
    for i in range(nx):
        for k in range(nz):
            lattice.add(p, i, 0, k, (0.0, +0.35 * hy, 0.0))
            lattice.add(p, i, ny - 1, k, (0.0, -0.35 * hy, 0.0))
        for j in range(ny):
            lattice.add(p, i, j, 0, (0.0, 0.0, +0.30 * hz))
            lattice.add(p, i, j, nz - 1, (0.0, 0.0, -0.30 * hz))
    for j in range(ny):
        for k in range(nz):
            lattice.add(p, 0, j, k, (-0.18 * hx, 0.0, 0.0))
            lattice.add(p, nx - 1, j, k, (+0.18 * hx, 0.0, 0.0))
    patterns.append(("torpedo", p))

    # winged bodies: lateral mid-plane bulges at 1..4 x-stations
    wing_stations = [
        [1],
        [1, 2],
        [0, 1, 2],
        list(range(nx)),
    ]
    k_mid = nz // 2
    for n_wings, stations in enumerate(wing_stations, start=1):
        p = np.zeros(lattice.n_params)
        for i in stations:
            lattice.add(p, i, 0, k_mid, (0.0, -1.6 * hy, 0.0))
            lattice.add(p, i, ny - 1, k_mid, (0.0, +1.6 * hy, 0.0))
            # thin the wing region vertically
            for j in (0, ny - 1):
                lattice.add(p, i, j, 0, (0.0, 0.0, +0.25 * hz))
                lattice.add(p, i, j, nz - 1, (0.0, 0.0, -0.25 * hz))
        patterns.append((f"wing{n_wings}", p))

    # flattened ray: compress vertically, widen laterally
    p = np.zeros(lattice.n_params)
    for i in range(nx):
        for j in range(ny):
            lattice.add(p, i, j, 0, (0.0, 0.0, +0.45 * hz))
            lattice.add(p, i, j, nz - 1, (0.0, 0.0, -0.45 * hz))
    for i in mid_i:
        for k in range(nz):
            lattice.add(p, i, 0, k, (0.0, -0.8 * hy, 0.0))
            lattice.add(p, i, ny - 1, k, (0.0, +0.8 * hy, 0.0))
    patterns.append(("ray", p))

    # deep keel: drop the bottom center line, narrow the beam
    p = np.zeros(lattice.n_params)
    j_mid = ny // 2
    for i in mid_i:
        lattice.add(p, i, j_mid, 0, (0.0, 0.0, -1.1 * hz))
    for i in range(nx):
        for k in range(nz):
            lattice.add(p, i, 0, k, (0.0, +0.25 * hy, 0.0))
            lattice.add(p, i, ny - 1, k, (0.0, -0.25 * hy, 0.0))
    patterns.append(("keel", p))

    return patterns


def make_base_family(
    seed: int,
    n: int,
    *,
    semi_axes: tuple[float, float, float] = DEFAULT_SEMI_AXES,
    subdivisions: int = DEFAULT_SUBDIVISIONS,
    cage_dims: tuple[int, int, int] = DEFAULT_CAGE_DIMS,
    margin: float = DEFAULT_MARGIN,
    jitter_frac: float = DEFAULT_JITTER_FRAC,
) -> BaseShapeFamily:
    """Generate n base shapes by cycling archetypes with scaled amplitudes
    and seeded jitter.  Every shape is validated to deform to a
    positive-volume mesh; a degenerate one raises GenerationError."""
    if n < 2:
        raise ValueError(f"need at least 2 base shapes, got {n}")

    base_mesh = make_ellipsoid(*semi_axes, subdivisions=subdivisions)
    cage = bind_cage(base_mesh, *cage_dims, margin=margin)
    lattice = _Lattice(cage_dims)
    half_extent = (base_mesh.vertices.max(axis=0) - base_mesh.vertices.min(axis=0)) / 2.0
    body_length = 2.0 * half_extent[0]
    patterns = _archetype_patterns(lattice, half_extent)

    amplitude_cycle = (1.0, 0.75, 1.25, 0.6, 1.4)
    rng = np.random.default_rng(seed)
    names: list[str] = []
    params = np.empty((n, lattice.n_params))
    for idx in range(n):
        arch_name, pattern = patterns[idx % len(patterns)]
        rep = idx // len(patterns)
        amplitude = amplitude_cycle[rep % len(amplitude_cycle)]
        jitter = rng.uniform(-1.0, 1.0, lattice.n_params) * jitter_frac * body_length
        vector = amplitude * pattern + jitter
        name = f"{arch_name}-{rep}"
        try:
            deform(cage, vector, base_mesh)
        except DegenerateShapeError as exc:
            raise GenerationError(f"archetype {name!r} produced a degenerate mesh: {exc}") from exc
        names.append(name)
        params[idx] = vector

    meta = {
        "semi_axes": list(semi_axes),
        "subdivisions": subdivisions,
        "cage_dims": list(cage_dims),
        "margin": margin,
        "jitter_frac": jitter_frac,
    }
    return BaseShapeFamily(names, params, cage, base_mesh, seed, meta)


def build_dataset(
    family: BaseShapeFamily,
    morphs_per_pair: int,
    aoas_deg: tuple[float, ...] = DEFAULT_AOAS_DEG,
    flow: FlowConditions = FlowConditions(),
) -> DatasetBuild:
    """Label bases plus all pairwise morphs across the AoA grid.

    Morphs sit at t = k/(morphs_per_pair + 1), k = 1..morphs_per_pair,
    strictly between their endpoint bases.  Shapes whose deformation
    degenerates are skipped and reported, never fatal.
    """
    if morphs_per_pair < 0:
        raise ValueError(f"morphs_per_pair must be >= 0, got {morphs_per_pair}")

    shapes: list[tuple[str, np.ndarray, dict]] = []
    for i in range(family.n_shapes):
        shapes.append((f"base-{i:03d}", family.params[i], {"kind": "base", "index": i, "name": family.names[i]}))
    for i, j in itertools.combinations(range(family.n_shapes), 2):
        for k in range(1, morphs_per_pair + 1):
            t = k / (morphs_per_pair + 1)
            vector = interpolate(family.params[i], family.params[j], t)
            shapes.append(
                (f"morph-{i:03d}-{j:03d}-{k:02d}", vector, {"kind": "morph", "pair": [i, j], "t": t})
            )

    alphas = [AngleOfAttack.from_degrees(a) for a in aoas_deg]
    samples: list[LabeledSample] = []
    skipped: list[str] = []
    for shape_id, vector, provenance in shapes:
        try:
            mesh = deform(family.cage, vector, family.base_mesh)
        except DegenerateShapeError:
            skipped.append(shape_id)
            continue
        features = mesh_features(mesh)
        for aoa_deg, alpha in zip(aoas_deg, alphas):
            coeffs = oracle_coefficients(features, alpha, flow)
            samples.append(
                LabeledSample(
                    sample_id=f"{shape_id}@{aoa_deg:g}",
                    shape_id=shape_id,
                    params=vector,
                    aoa_deg=float(aoa_deg),
                    cd=coeffs.cd,
                    cl=coeffs.cl,
                    provenance=provenance,
                )
            )
    return DatasetBuild(samples=samples, skipped_shapes=skipped)


def split_by_shape(
    samples: list[LabeledSample], test_fraction: float, seed: int
) -> tuple[list[LabeledSample], list[LabeledSample]]:
    """Shape-level train/test split: all AoA rows of a shape land on one side."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    shape_ids = list(dict.fromkeys(s.shape_id for s in samples))
    if len(shape_ids) < 2:
        raise ValueError(f"need at least 2 shapes to split, got {len(shape_ids)}")

    rng = np.random.default_rng(seed)
    order = rng.permutation(len(shape_ids))
    n_test = int(round(len(shape_ids) * test_fraction))
    n_test = min(max(n_test, 1), len(shape_ids) - 1)
    test_ids = {shape_ids[i] for i in order[:n_test]}

    train = [s for s in samples if s.shape_id not in test_ids]
    test = [s for s in samples if s.shape_id in test_ids]
    return train, test


def normalization_stats(samples: list[LabeledSample]) -> tuple[np.ndarray, np.ndarray]:
    """Per-dimension mean/std of the cage parameters (std floored at 1e-8)."""
    mat = np.stack([s.params for s in samples])
    mean = mat.mean(axis=0)
    std = np.maximum(mat.std(axis=0), 1e-8)
    return mean, std


def write_dataset(path: str | Path, build: DatasetBuild) -> None:
    """One JSON record per sample, in deterministic order."""
    with open(path, "w") as fh:
        for s in build.samples:
            record = {
                "id": s.sample_id,
                "shape": s.shape_id,
                "params": [float(x) for x in s.params],
                "aoa_deg": s.aoa_deg,
                "cd": s.cd,
                "cl": s.cl,
                "provenance": s.provenance,
            }
            fh.write(json.dumps(record) + "\n")


def read_dataset(path: str | Path) -> list[LabeledSample]:
    samples = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                samples.append(
                    LabeledSample(
                        sample_id=rec["id"],
                        shape_id=rec["shape"],
                        params=np.array(rec["params"], dtype=np.float64),
                        aoa_deg=float(rec["aoa_deg"]),
                        cd=float(rec["cd"]),
                        cl=float(rec["cl"]),
                        provenance=rec["provenance"],
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}: parse error at line {lineno}: {exc}") from exc
    return samples


def write_family(path: str | Path, family: BaseShapeFamily) -> None:
    """Family parameters as JSON; the cage and base mesh are rebuilt from
    the recorded geometry settings on load."""
    record = {
        "tool_version": __version__,
        "seed": family.seed,
        "geometry": family.geometry_meta,
        "names": family.names,
        "params": [[float(x) for x in row] for row in family.params],
    }
    Path(path).write_text(json.dumps(record, indent=1) + "\n")


def read_family(path: str | Path) -> BaseShapeFamily:
    text = Path(path).read_text()
    try:
        record = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: parse error at line {exc.lineno}: {exc.msg}") from exc
    try:
        geo = record["geometry"]
        names = record["names"]
        params = np.array(record["params"], dtype=np.float64)
        seed = record["seed"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: malformed family file: {exc}") from exc

    base_mesh = make_ellipsoid(*geo["semi_axes"], subdivisions=geo["subdivisions"])
    cage = bind_cage(base_mesh, *geo["cage_dims"], margin=geo["margin"])
    if params.ndim != 2 or params.shape[1] != cage.n_params:
        raise ValueError(
            f"{path}: parameter matrix {params.shape} does not match cage ({cage.n_params} params)"
        )
    return BaseShapeFamily(names, params, cage, base_mesh, seed, geo)


def dataset_metadata(
    family: BaseShapeFamily,
    build: DatasetBuild,
    flow: FlowConditions,
    aoas_deg: tuple[float, ...],
    test_fraction: float,
    split_seed: int,
    train: list[LabeledSample],
    test: list[LabeledSample],
) -> dict:
    """Companion metadata: geometry, flow, split, and normalization stats
    (computed on the train side only)."""
    mean, std = normalization_stats(train)
    return {
        "tool_version": __version__,
        "family_seed": family.seed,
        "n_base_shapes": family.n_shapes,
        "geometry": family.geometry_meta,
        "flow": {"rho": flow.rho, "mu": flow.mu, "speed": flow.speed},
        "aoas_deg": list(aoas_deg),
        "n_samples": build.n_samples,
        "skipped_shapes": build.skipped_shapes,
        "test_fraction": test_fraction,
        "split_seed": split_seed,
        "train_shape_ids": sorted({s.shape_id for s in train}),
        "test_shape_ids": sorted({s.shape_id for s in test}),
        "normalization": {"mean": [float(x) for x in mean], "std": [float(x) for x in std]},
    }
