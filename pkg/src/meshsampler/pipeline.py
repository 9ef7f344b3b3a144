"""File and dataset orchestration.

``process_file`` runs the whole conversion for one OBJ: parse, score
face visibility, cull duplicates/invisible faces, sample colored
points, voxelize, write PLY.  Every stage failure is captured in the
returned ManifestEntry instead of raised, so a batch never dies on one
bad asset.  ``process_batch`` maps that over a directory tree with a
thread pool and writes a ``manifest.json``.  ``generate_fixture``
emits small synthetic OBJ scenes with analytically known answers.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ao import AoConfig, compute_face_quality
from .cull import CullReport, cull_internal_faces, find_duplicate_groups
from .geometry import bvh_from_mesh
from .mesh_io import load_obj, save_ply
from .sample import SampleConfig, sample_mesh
from .voxel import voxelize

log = logging.getLogger("meshsampler")

CULL_POLICIES = ("full", "duplicates_only", "off")
DUPLICATE_MODES = ("by_index", "by_position")
PLY_ENCODINGS = ("ascii", "binary_little_endian")
FIXTURE_KINDS = ("doubled_cube", "nested_cubes", "textured_quad")


@dataclass
class PipelineConfig:
    """Everything one conversion run needs.

    ``input``/``output`` are a file pair for single-file runs and a
    directory pair for batch runs.  ``ao`` and ``sample`` default to
    configs built from ``n_points`` with seed 0.
    """

    input: str
    output: str
    n_points: int = 100_000
    resolution: int = 256
    ao: AoConfig = None
    sample: SampleConfig = None
    duplicate_mode: str = "by_position"
    cull_policy: str = "full"
    ply_encoding: str = "binary_little_endian"
    jobs: int = 1

    def __post_init__(self):
        if self.ao is None:
            self.ao = AoConfig()
        if self.sample is None:
            self.sample = SampleConfig(n_points=self.n_points)
        if self.sample.n_points != self.n_points:
            raise ValueError("sample.n_points disagrees with n_points")
        if self.resolution < 2:
            raise ValueError("resolution must be >= 2")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if self.duplicate_mode not in DUPLICATE_MODES:
            raise ValueError(f"unknown duplicate mode {self.duplicate_mode!r}")
        if self.cull_policy not in CULL_POLICIES:
            raise ValueError(f"unknown cull policy {self.cull_policy!r}")
        if self.ply_encoding not in PLY_ENCODINGS:
            raise ValueError(f"unknown PLY encoding {self.ply_encoding!r}")


@dataclass
class ManifestEntry:
    input: str
    output: str
    status: str = "ok"               # "ok" | "failed"
    error: str = None                # "<stage>: <message>" when failed
    faces_before: int = None
    faces_after: int = None
    cull: CullReport = None
    point_count: int = None
    voxel_count: int = None
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        cull = None
        if self.cull is not None:
            cull = {
                "groups_found": self.cull.groups_found,
                "faces_removed": self.cull.faces_removed,
                "kept_by_tie_break": self.cull.kept_by_tie_break,
                "invisible_removed": self.cull.invisible_removed,
            }
        return {
            "input": self.input,
            "output": self.output,
            "status": self.status,
            "error": self.error,
            "faces_before": self.faces_before,
            "faces_after": self.faces_after,
            "cull": cull,
            "point_count": self.point_count,
            "voxel_count": self.voxel_count,
            "wall_time_s": self.wall_time_s,
        }


def process_file(cfg: PipelineConfig, path, output=None, ao_threads=None) -> ManifestEntry:
    """Convert one OBJ file to a voxelized PLY cloud.

    Any stage error is recorded as ``failed("<stage>: <message>")`` in
    the entry; nothing escapes this boundary.  ``output`` overrides
    ``cfg.output`` (used by the batch runner), ``ao_threads`` the
    number of visibility-kernel threads (defaults to ``cfg.jobs``).
    """
    path = Path(path)
    output = Path(cfg.output if output is None else output)
    if ao_threads is None:
        ao_threads = cfg.jobs
    entry = ManifestEntry(input=str(path), output=str(output))
    t0 = time.perf_counter()
    stage = "parse"
    try:
        if not path.is_file():
            raise FileNotFoundError("file not found")
        mesh = load_obj(path)
        entry.faces_before = mesh.num_faces

        stage = "ao"
        bvh = bvh_from_mesh(mesh)
        quality = compute_face_quality(mesh, bvh, cfg.ao, threads=ao_threads)

        stage = "cull"
        if cfg.cull_policy != "off":
            groups = find_duplicate_groups(mesh, mode=cfg.duplicate_mode)
            mesh, entry.cull = cull_internal_faces(
                mesh, quality, groups,
                remove_invisible=(cfg.cull_policy == "full"),
            )
        entry.faces_after = mesh.num_faces

        stage = "sample"
        cloud = sample_mesh(mesh, cfg.sample)
        entry.point_count = len(cloud)

        stage = "voxelize"
        voxels = voxelize(cloud, cfg.resolution)
        entry.voxel_count = len(voxels)

        stage = "write"
        output.parent.mkdir(parents=True, exist_ok=True)
        save_ply(voxels, output, encoding=cfg.ply_encoding)
    except Exception as exc:
        entry.status = "failed"
        entry.error = f"{stage}: {exc}"
        entry.wall_time_s = time.perf_counter() - t0
        log.warning("%s failed (%s)", path, entry.error)
        return entry

    entry.wall_time_s = time.perf_counter() - t0
    log.info(
        "%s ok: faces %d -> %d, %d points, %d voxels, %.2fs",
        path, entry.faces_before, entry.faces_after,
        entry.point_count, entry.voxel_count, entry.wall_time_s,
    )
    return entry


def process_batch(cfg: PipelineConfig) -> list:
    """Convert every ``*.obj`` under ``cfg.input`` (recursively).

    Outputs mirror the input tree under ``cfg.output`` with a ``.ply``
    suffix, and a ``manifest.json`` is written at the output root.
    Entries keep sorted-input order whatever the completion order; up
    to ``cfg.jobs`` files run concurrently, and leftover workers go to
    the visibility kernel when there are fewer files than jobs.
    """
    in_dir = Path(cfg.input)
    if not in_dir.is_dir():
        raise NotADirectoryError(f"not a directory: {in_dir}")
    out_root = Path(cfg.output)
    out_root.mkdir(parents=True, exist_ok=True)

    paths = sorted(in_dir.rglob("*.obj"))
    n = len(paths)
    workers = min(cfg.jobs, n) if n else 1
    ao_threads = cfg.jobs // n if n and cfg.jobs > n else 1

    def run_one(path: Path) -> ManifestEntry:
        rel = path.relative_to(in_dir)
        rel_out = rel.with_suffix(".ply")
        try:
            entry = process_file(cfg, path, output=out_root / rel_out,
                                 ao_threads=ao_threads)
        except Exception as exc:  # process_file should not raise; belt and braces
            entry = ManifestEntry(input=str(path), output=str(out_root / rel_out),
                                  status="failed", error=f"internal: {exc}")
        # manifest paths are relative to their roots so two runs of the same
        # tree produce comparable manifests
        entry.input = rel.as_posix()
        entry.output = rel_out.as_posix()
        return entry

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(run_one, paths))
    else:
        entries = [run_one(p) for p in paths]

    manifest = out_root / "manifest.json"
    with open(manifest, "w", encoding="utf-8") as fh:
        json.dump([e.to_dict() for e in entries], fh, indent=2, sort_keys=True)
        fh.write("\n")
    return entries


# ---------------------------------------------------------------------------
# synthetic fixtures

# unit cube corners, and each face as an outward-wound (CCW from outside)
# vertex-index quad
_CUBE_CORNERS = [
    (0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.0, 1.0, 0.0), (0.0, 1.0, 0.0),
    (0.0, 0.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, 1.0), (0.0, 1.0, 1.0),
]
_CUBE_QUADS = [
    (1, 4, 3, 2),  # z = 0
    (5, 6, 7, 8),  # z = 1
    (1, 2, 6, 5),  # y = 0
    (3, 4, 8, 7),  # y = 1
    (1, 5, 8, 4),  # x = 0
    (2, 3, 7, 6),  # x = 1
]


def _cube_triangles(offset: int = 0):
    """Outward triangles of the unit cube with 1-based index offset."""
    tris = []
    for a, b, c, d in _CUBE_QUADS:
        tris.append((a + offset, b + offset, c + offset))
        tris.append((a + offset, c + offset, d + offset))
    return tris


def _obj_lines(vertices, chunks):
    """OBJ text from vertices and (material, faces) chunks."""
    lines = []
    for v in vertices:
        lines.append("v {:.6f} {:.6f} {:.6f}".format(*v))
    for material, faces in chunks:
        lines.append(f"usemtl {material}")
        for f in faces:
            lines.append("f " + " ".join(str(i) for i in f))
    return lines


def _write_checker_png(path, dark=0, light=255):
    from PIL import Image

    px = np.array(
        [[[dark] * 3, [light] * 3],
         [[light] * 3, [dark] * 3]], dtype=np.uint8,
    )
    Image.fromarray(px, mode="RGB").save(path)


def generate_fixture(kind: str, out) -> None:
    """Write a synthetic OBJ/MTL test scene into directory ``out``.

    ``doubled_cube``: unit cube whose 12 red outward triangles are each
    doubled by a blue copy with reversed winding on the same vertices.
    ``nested_cubes``: red unit cube with a green half-size cube
    strictly inside it.  ``textured_quad``: two triangles with UVs over
    a 2x2 black/white checker texture.
    """
    if kind not in FIXTURE_KINDS:
        raise ValueError(f"unknown fixture kind {kind!r}")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    obj_path = out / f"{kind}.obj"
    mtl_path = out / f"{kind}.mtl"

    if kind == "doubled_cube":
        outer = _cube_triangles()
        inner = [(c, b, a) for a, b, c in outer]
        obj = _obj_lines(_CUBE_CORNERS, [("outer", outer), ("inner", inner)])
        mtl = [
            "newmtl outer", "Kd 1.000 0.000 0.000",
            "newmtl inner", "Kd 0.000 0.000 1.000",
        ]
    elif kind == "nested_cubes":
        verts = list(_CUBE_CORNERS)
        verts += [tuple(0.25 + 0.5 * x for x in v) for v in _CUBE_CORNERS]
        obj = _obj_lines(
            verts,
            [("outer", _cube_triangles()), ("inner", _cube_triangles(offset=8))],
        )
        mtl = [
            "newmtl outer", "Kd 1.000 0.000 0.000",
            "newmtl inner", "Kd 0.000 1.000 0.000",
        ]
    else:  # textured_quad
        _write_checker_png(out / "checker.png")
        obj = [
            "v 0.000000 0.000000 0.000000",
            "v 1.000000 0.000000 0.000000",
            "v 1.000000 1.000000 0.000000",
            "v 0.000000 1.000000 0.000000",
            "vt 0.000000 0.000000",
            "vt 1.000000 0.000000",
            "vt 1.000000 1.000000",
            "vt 0.000000 1.000000",
            "usemtl checker",
            "f 1/1 2/2 3/3",
            "f 1/1 3/3 4/4",
        ]
        mtl = ["newmtl checker", "map_Kd checker.png"]

    obj.insert(0, f"mtllib {mtl_path.name}")
    obj_path.write_text("\n".join(obj) + "\n", encoding="utf-8")
    mtl_path.write_text("\n".join(mtl) + "\n", encoding="utf-8")
