"""Mesh and point-cloud file formats.

Readers and writers for the interchange formats the pipeline touches:

* **OBJ/MTL** — Wavefront text meshes with ``v``, ``vt``, ``f``,
  ``usemtl``, ``mtllib`` directives; polygons are fan-triangulated,
  negative (relative) indices resolved, unknown directives skipped.
* **Textures** — PNG/JPEG (anything Pillow decodes) to 8-bit RGB.
* **PLY** — point clouds, ascii and binary_little_endian encodings,
  properties exactly x, y, z as float32 and red, green, blue as uint8.

Parsed values are plain numpy arrays and are never mutated after
construction, so meshes and textures can be shared freely across
threads.
"""

from __future__ import annotations

import io
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MeshParseError, PlyParseError, TextureLoadError

log = logging.getLogger(__name__)

# Diffuse color used for faces with no resolvable material.
DEFAULT_DIFFUSE = (0.5, 0.5, 0.5)


@dataclass(eq=False)
class TextureImage:
    """8-bit RGB image, row-major, row 0 at the top of the image."""

    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8

    def __post_init__(self):
        self.pixels = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError(
                f"pixel buffer shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}x3"
            )


@dataclass(eq=False)
class Material:
    """Diffuse appearance of a face: flat color and optional texture."""

    diffuse: tuple[float, float, float] = DEFAULT_DIFFUSE
    texture: TextureImage | None = None
    name: str = ""


@dataclass(eq=False)
class Face:
    """One triangle: vertex indices, optional UV indices, optional material."""

    v: tuple[int, int, int]
    uv: tuple[int, int, int] | None = None
    material: int | None = None


@dataclass(eq=False)
class Mesh:
    """Indexed triangle mesh with per-face material references.

    Faces are stored as packed index arrays; ``face_uvs`` holds -1 for
    faces without texture coordinates and ``face_materials`` -1 for
    faces without a material (those render as :data:`DEFAULT_DIFFUSE`).
    """

    vertices: np.ndarray        # (V, 3) float64
    uvs: np.ndarray             # (T, 2) float64
    face_vertices: np.ndarray   # (F, 3) int32
    face_uvs: np.ndarray        # (F, 3) int32, -1 where absent
    face_materials: np.ndarray  # (F,) int32, -1 where absent
    materials: list[Material] = field(default_factory=list)

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.uvs = np.ascontiguousarray(self.uvs, dtype=np.float64).reshape(-1, 2)
        self.face_vertices = np.ascontiguousarray(self.face_vertices, dtype=np.int32).reshape(-1, 3)
        self.face_uvs = np.ascontiguousarray(self.face_uvs, dtype=np.int32).reshape(-1, 3)
        self.face_materials = np.ascontiguousarray(self.face_materials, dtype=np.int32).reshape(-1)
        n = len(self.face_vertices)
        if len(self.face_uvs) != n or len(self.face_materials) != n:
            raise ValueError("face arrays disagree on face count")
        if n:
            if self.face_vertices.min() < 0 or self.face_vertices.max() >= len(self.vertices):
                raise ValueError("face vertex index out of range")
            used_uv = self.face_uvs[self.face_uvs >= 0]
            if used_uv.size and used_uv.max() >= len(self.uvs):
                raise ValueError("face UV index out of range")
            if self.face_materials.max(initial=-1) >= len(self.materials):
                raise ValueError("face material index out of range")

    @classmethod
    def from_faces(cls, vertices, faces, uvs=None, materials=None):
        """Build a Mesh from a sequence of :class:`Face`."""
        faces = list(faces)
        fv = np.array([f.v for f in faces], dtype=np.int32).reshape(-1, 3)
        fuv = np.array(
            [f.uv if f.uv is not None else (-1, -1, -1) for f in faces], dtype=np.int32
        ).reshape(-1, 3)
        fmat = np.array(
            [f.material if f.material is not None else -1 for f in faces], dtype=np.int32
        )
        return cls(
            vertices=np.asarray(vertices, dtype=np.float64).reshape(-1, 3),
            uvs=np.zeros((0, 2)) if uvs is None else np.asarray(uvs, dtype=np.float64).reshape(-1, 2),
            face_vertices=fv,
            face_uvs=fuv,
            face_materials=fmat,
            materials=list(materials) if materials else [],
        )

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_faces(self):
        return len(self.face_vertices)

    def face(self, i) -> Face:
        """Per-face view as a :class:`Face`."""
        v = tuple(int(x) for x in self.face_vertices[i])
        uv = self.face_uvs[i]
        m = int(self.face_materials[i])
        return Face(
            v=v,
            uv=tuple(int(x) for x in uv) if uv[0] >= 0 else None,
            material=m if m >= 0 else None,
        )

    def faces(self):
        """All faces as a list of :class:`Face` (small meshes / tests)."""
        return [self.face(i) for i in range(self.num_faces)]

    def triangle_corners(self):
        """Corner positions as three (F, 3) arrays ``a, b, c``."""
        v = self.vertices
        f = self.face_vertices
        return v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]

    def degenerate_mask(self):
        """Boolean (F,) mask: repeated vertex index or exactly zero area."""
        f = self.face_vertices
        repeated = (f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])
        a, b, c = self.triangle_corners()
        cross = np.cross(b - a, c - a)
        area2 = np.einsum("ij,ij->i", cross, cross)
        return repeated | (area2 == 0.0)

    def replace_faces(self, keep_index):
        """New Mesh keeping only the faces in ``keep_index`` (order given)."""
        keep_index = np.asarray(keep_index, dtype=np.int64)
        return Mesh(
            vertices=self.vertices,
            uvs=self.uvs,
            face_vertices=self.face_vertices[keep_index],
            face_uvs=self.face_uvs[keep_index],
            face_materials=self.face_materials[keep_index],
            materials=self.materials,
        )


@dataclass(eq=False)
class PointCloud:
    """Colored point set.

    Positions are float32 (the PLY storage type).  When
    ``grid_resolution`` is set the cloud is voxelized: every coordinate
    is an integer in [0, R-1] and coordinate triples are unique.
    """

    points: np.ndarray  # (N, 3) float32
    colors: np.ndarray  # (N, 3) uint8
    grid_resolution: int | None = None

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=np.float32).reshape(-1, 3)
        self.colors = np.ascontiguousarray(self.colors, dtype=np.uint8).reshape(-1, 3)
        if len(self.points) != len(self.colors):
            raise ValueError("points and colors length mismatch")

    def __len__(self):
        return len(self.points)


def _as_text_lines(source):
    """Decode a byte stream / bytes / str into a list of text lines."""
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, str):
        return source.splitlines()
    else:
        data = source.read()
        if isinstance(data, str):
            return data.splitlines()
    return data.decode("utf-8", errors="replace").splitlines()


def _parse_floats(tokens, n, lineno, what):
    if len(tokens) < n:
        raise MeshParseError(f"{what} needs {n} values, got {len(tokens)}", line=lineno)
    try:
        return [float(t) for t in tokens[:n]]
    except ValueError as exc:
        raise MeshParseError(f"malformed number in {what}: {exc}", line=lineno) from exc


def _resolve_index(raw, current_count, lineno, what):
    """OBJ index to zero-based; negatives are relative to entries so far."""
    if raw == 0:
        raise MeshParseError(f"{what} index 0 is invalid (OBJ is 1-based)", line=lineno)
    if raw < 0:
        idx = current_count + raw
        if idx < 0:
            raise MeshParseError(
                f"relative {what} index {raw} reaches before the first entry", line=lineno
            )
        return idx
    return raw - 1


def parse_obj(source, base_path=".") -> Mesh:
    """Parse a Wavefront OBJ byte stream into a :class:`Mesh`.

    Parameters
    ----------
    source : bytes or binary file-like or str
        OBJ content.  Arbitrary bytes are tolerated: undecodable runs
        become replacement characters and land in skipped directives or
        structured parse errors, never in uncaught exceptions.
    base_path : path-like
        Directory against which ``mtllib`` and texture paths resolve.

    Returns
    -------
    Mesh

    Raises
    ------
    MeshParseError
        Malformed numeric literal or face index out of range, with the
        1-based line number.  A missing MTL file is only a warning; its
        materials fall back to untextured mid-gray.
    """
    base = Path(base_path)
    vertices: list[list[float]] = []
    uvs: list[list[float]] = []
    fv: list[tuple[int, int, int]] = []
    fuv: list[tuple[int, int, int]] = []
    fmat: list[int] = []
    face_lines: list[int] = []
    materials: list[Material] = []
    mat_index: dict[str, int] = {}
    current_mat = -1

    for lineno, raw in enumerate(_as_text_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        directive = tokens[0]

        if directive == "v":
            vertices.append(_parse_floats(tokens[1:], 3, lineno, "vertex"))
        elif directive == "vt":
            uvs.append(_parse_floats(tokens[1:], 2, lineno, "texture coordinate"))
        elif directive == "f":
            corners = tokens[1:]
            if len(corners) < 3:
                raise MeshParseError("face needs at least 3 vertices", line=lineno)
            vi: list[int] = []
            ti: list[int] = []
            has_uv = True
            for corner in corners:
                parts = corner.split("/")
                try:
                    v_raw = int(parts[0])
                    t_raw = int(parts[1]) if len(parts) > 1 and parts[1] else None
                except ValueError as exc:
                    raise MeshParseError(f"malformed face corner {corner!r}", line=lineno) from exc
                vi.append(_resolve_index(v_raw, len(vertices), lineno, "vertex"))
                if t_raw is None:
                    has_uv = False
                else:
                    ti.append(_resolve_index(t_raw, len(uvs), lineno, "texture coordinate"))
            # fan triangulation preserving winding: k-gon -> k-2 triangles
            for k in range(1, len(vi) - 1):
                fv.append((vi[0], vi[k], vi[k + 1]))
                fuv.append((ti[0], ti[k], ti[k + 1]) if has_uv else (-1, -1, -1))
                fmat.append(current_mat)
                face_lines.append(lineno)
        elif directive == "mtllib":
            for name in tokens[1:]:
                mtl_path = base / name
                if not mtl_path.is_file():
                    log.warning("MTL file not found: %s (materials fall back to gray)", mtl_path)
                    continue
                with open(mtl_path, "rb") as fh:
                    for mat in parse_mtl(fh, base_path=base):
                        if mat.name not in mat_index:
                            mat_index[mat.name] = len(materials)
                            materials.append(mat)
        elif directive == "usemtl":
            name = tokens[1] if len(tokens) > 1 else ""
            if name in mat_index:
                current_mat = mat_index[name]
            else:
                log.warning("unknown material %r; using default gray", name)
                current_mat = -1
        # every other directive (vn, o, g, s, ...) is skipped

    # absolute indices may reference vertices defined later in the file,
    # so range-check only after the whole stream is consumed
    nv, nt = len(vertices), len(uvs)
    for face_i, (v3, t3) in enumerate(zip(fv, fuv)):
        if max(v3) >= nv:
            raise MeshParseError(
                f"face vertex index {max(v3) + 1} out of range (have {nv} vertices)",
                line=face_lines[face_i],
            )
        if t3[0] >= 0 and max(t3) >= nt:
            raise MeshParseError(
                f"face texture index {max(t3) + 1} out of range (have {nt})",
                line=face_lines[face_i],
            )

    return Mesh(
        vertices=np.array(vertices, dtype=np.float64).reshape(-1, 3),
        uvs=np.array(uvs, dtype=np.float64).reshape(-1, 2),
        face_vertices=np.array(fv, dtype=np.int32).reshape(-1, 3),
        face_uvs=np.array(fuv, dtype=np.int32).reshape(-1, 3),
        face_materials=np.array(fmat, dtype=np.int32),
        materials=materials,
    )


def load_obj(path) -> Mesh:
    """Parse the OBJ file at ``path`` (mtllib resolves next to it)."""
    path = Path(path)
    with open(path, "rb") as fh:
        return parse_obj(fh, base_path=path.parent)


def _clamp01(x):
    return min(1.0, max(0.0, x))


def parse_mtl(source, base_path=".") -> list[Material]:
    """Parse an MTL byte stream.

    Honors ``newmtl``, ``Kd`` (clamped per channel to [0, 1]) and
    ``map_Kd``; texture paths resolve relative to ``base_path``.  A
    missing or undecodable texture logs a warning and the material keeps
    its flat diffuse color.
    """
    base = Path(base_path)
    materials: list[Material] = []
    # MTL convention: a material without Kd renders as 0.8 gray
    diffuse = (0.8, 0.8, 0.8)
    texture = None
    name = None

    def flush():
        if name is not None:
            materials.append(Material(diffuse=diffuse, texture=texture, name=name))

    for lineno, raw in enumerate(_as_text_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        directive = tokens[0]
        if directive == "newmtl":
            flush()
            name = tokens[1] if len(tokens) > 1 else ""
            diffuse = (0.8, 0.8, 0.8)
            texture = None
        elif directive == "Kd":
            r, g, b = _parse_floats(tokens[1:], 3, lineno, "Kd")
            diffuse = (_clamp01(r), _clamp01(g), _clamp01(b))
        elif directive == "map_Kd":
            if len(tokens) < 2:
                raise MeshParseError("map_Kd needs a file name", line=lineno)
            tex_path = base / tokens[-1]  # last token: skip map options
            if not tex_path.is_file():
                log.warning("texture not found: %s (falling back to Kd)", tex_path)
                continue
            try:
                texture = load_texture(tex_path)
            except TextureLoadError as exc:
                log.warning("%s (falling back to Kd)", exc)
    flush()
    return materials


def load_texture(path) -> TextureImage:
    """Decode an image file into 8-bit RGB.

    Alpha is discarded and grayscale expanded.  PNG and JPEG are
    guaranteed; other Pillow-supported formats come along for free.
    """
    from PIL import Image, UnidentifiedImageError

    path = Path(path)
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB")
            arr = np.asarray(rgb, dtype=np.uint8)
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise TextureLoadError(f"cannot decode texture {path}: {exc}") from exc
    return TextureImage(width=arr.shape[1], height=arr.shape[0], pixels=arr)


_PLY_DTYPES = {
    "float": ("<f4", float), "float32": ("<f4", float),
    "double": ("<f8", float), "float64": ("<f8", float),
    "uchar": ("u1", int), "uint8": ("u1", int),
    "char": ("i1", int), "int8": ("i1", int),
    "ushort": ("<u2", int), "uint16": ("<u2", int),
    "short": ("<i2", int), "int16": ("<i2", int),
    "uint": ("<u4", int), "uint32": ("<u4", int),
    "int": ("<i4", int), "int32": ("<i4", int),
}


def write_ply(cloud: PointCloud, encoding="binary_little_endian", sink=None):
    """Serialize a point cloud as PLY.

    Properties are written in the fixed order x, y, z (float32) then
    red, green, blue (uint8); binary records are therefore exactly 15
    bytes.  Ascii floats use 9 significant digits, which round-trips
    float32 losslessly.  A voxelized cloud records its grid resolution
    in a header comment so reading restores it.

    Parameters
    ----------
    cloud : PointCloud
    encoding : {"binary_little_endian", "ascii"}
    sink : binary file-like, or None to get the encoded bytes back
    """
    if encoding not in ("ascii", "binary_little_endian"):
        raise ValueError(f"unknown PLY encoding {encoding!r}")
    out_bytes = sink is None
    if out_bytes:
        sink = io.BytesIO()
    header = ["ply", f"format {encoding} 1.0"]
    if cloud.grid_resolution is not None:
        header.append(f"comment grid_resolution {cloud.grid_resolution}")
    header += [
        f"element vertex {len(cloud)}",
        "property float x",
        "property float y",
        "property float z",
        "property uchar red",
        "property uchar green",
        "property uchar blue",
        "end_header",
    ]
    sink.write(("\n".join(header) + "\n").encode("ascii"))

    if encoding == "ascii":
        out = io.StringIO()
        for (x, y, z), (r, g, b) in zip(cloud.points, cloud.colors):
            out.write(f"{x:.9g} {y:.9g} {z:.9g} {r} {g} {b}\n")
        sink.write(out.getvalue().encode("ascii"))
    else:
        rec = np.empty(
            len(cloud),
            dtype=[("x", "<f4"), ("y", "<f4"), ("z", "<f4"),
                   ("red", "u1"), ("green", "u1"), ("blue", "u1")],
        )
        rec["x"], rec["y"], rec["z"] = cloud.points[:, 0], cloud.points[:, 1], cloud.points[:, 2]
        rec["red"], rec["green"], rec["blue"] = cloud.colors[:, 0], cloud.colors[:, 1], cloud.colors[:, 2]
        sink.write(rec.tobytes())

    if out_bytes:
        return sink.getvalue()
    return None


def save_ply(cloud: PointCloud, path, encoding="binary_little_endian"):
    with open(path, "wb") as fh:
        write_ply(cloud, encoding=encoding, sink=fh)


def read_ply(source) -> PointCloud:
    """Parse a PLY point cloud (both encodings written by `write_ply`).

    The vertex element needs at least x, y, z; red/green/blue default to
    0 when absent.  Unknown scalar properties are skipped.  Elements
    before the vertex element are skipped when that is possible (always
    in ascii; fixed-size records in binary).

    Raises
    ------
    PlyParseError
        Malformed header, unsupported layout, or truncated body.
    """
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        data = source.read()
    return _parse_ply(data)


def load_ply(path) -> PointCloud:
    with open(path, "rb") as fh:
        return read_ply(fh)


def _parse_ply(data: bytes) -> PointCloud:
    end = data.find(b"end_header")
    if not data.startswith(b"ply") or end < 0:
        raise PlyParseError("not a PLY file (missing magic or end_header)")
    body_start = data.find(b"\n", end)
    if body_start < 0:
        raise PlyParseError("header not terminated")
    body_start += 1

    header_lines = data[:end].decode("ascii", errors="replace").splitlines()
    encoding = None
    grid_resolution = None
    elements: list[dict] = []  # {"name", "count", "props": [(name, type)], "has_list": bool}
    for line in header_lines[1:]:
        tokens = line.split()
        if not tokens:
            continue
        kw = tokens[0]
        if kw == "format":
            if len(tokens) < 2 or tokens[1] not in ("ascii", "binary_little_endian"):
                raise PlyParseError(f"unsupported PLY format line: {line!r}")
            encoding = tokens[1]
        elif kw == "comment":
            if len(tokens) >= 3 and tokens[1] == "grid_resolution":
                try:
                    grid_resolution = int(tokens[2])
                except ValueError:
                    pass
        elif kw == "element":
            if len(tokens) < 3:
                raise PlyParseError(f"malformed element line: {line!r}")
            try:
                count = int(tokens[2])
            except ValueError as exc:
                raise PlyParseError(f"malformed element count: {line!r}") from exc
            elements.append({"name": tokens[1], "count": count, "props": [], "has_list": False})
        elif kw == "property":
            if not elements:
                raise PlyParseError("property before any element")
            if len(tokens) >= 2 and tokens[1] == "list":
                elements[-1]["has_list"] = True
            elif len(tokens) >= 3:
                if tokens[1] not in _PLY_DTYPES:
                    raise PlyParseError(f"unsupported property type {tokens[1]!r}")
                elements[-1]["props"].append((tokens[2], tokens[1]))
            else:
                raise PlyParseError(f"malformed property line: {line!r}")
    if encoding is None:
        raise PlyParseError("missing format line")

    vertex = next((e for e in elements if e["name"] == "vertex"), None)
    if vertex is None:
        raise PlyParseError("no vertex element")
    names = [p[0] for p in vertex["props"]]
    for needed in ("x", "y", "z"):
        if needed not in names:
            raise PlyParseError(f"vertex element lacks property {needed!r}")
    if vertex["has_list"]:
        raise PlyParseError("list properties on the vertex element are not supported")

    body = data[body_start:]
    if encoding == "ascii":
        lines = body.decode("ascii", errors="replace").splitlines()
        pos = 0
        for e in elements:
            if e["name"] == "vertex":
                break
            pos += e["count"]  # one record per line
        if pos + vertex["count"] > len(lines):
            raise PlyParseError("body shorter than the declared record count")
        n = vertex["count"]
        vals = np.zeros((n, len(names)), dtype=np.float64)
        for i in range(n):
            tokens = lines[pos + i].split()
            if len(tokens) < len(names):
                raise PlyParseError(f"vertex record {i} has {len(tokens)} fields, needs {len(names)}")
            try:
                vals[i] = [float(t) for t in tokens[: len(names)]]
            except ValueError as exc:
                raise PlyParseError(f"malformed vertex record {i}: {exc}") from exc
        cols = {name: vals[:, j] for j, name in enumerate(names)}
    else:
        offset = 0
        for e in elements:
            if e["name"] == "vertex":
                break
            if e["has_list"]:
                raise PlyParseError(
                    f"cannot skip binary element {e['name']!r} with list properties"
                )
            offset += e["count"] * sum(np.dtype(_PLY_DTYPES[t][0]).itemsize for _, t in e["props"])
        dtype = np.dtype([(name, _PLY_DTYPES[t][0]) for name, t in vertex["props"]])
        n = vertex["count"]
        need = offset + n * dtype.itemsize
        if len(body) < need:
            raise PlyParseError(
                f"body truncated: have {len(body)} bytes, need {need} for {n} records"
            )
        rec = np.frombuffer(body, dtype=dtype, count=n, offset=offset)
        cols = {name: rec[name] for name in names}

    points = np.stack(
        [cols["x"].astype(np.float32), cols["y"].astype(np.float32), cols["z"].astype(np.float32)],
        axis=1,
    )
    colors = np.zeros((vertex["count"], 3), dtype=np.uint8)
    for j, channel in enumerate(("red", "green", "blue")):
        if channel in cols:
            colors[:, j] = cols[channel].astype(np.uint8)
    return PointCloud(points=points, colors=colors, grid_resolution=grid_resolution)
