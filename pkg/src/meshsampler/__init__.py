"""Textured OBJ meshes to voxelized colored PLY point clouds.

The pipeline: parse OBJ/MTL, score every face by its visibility from
outside observers (ray-cast ambient occlusion over a BVH), drop
duplicated and invisible faces, sample colored points uniformly over
the surviving surface, quantize them onto a cubic voxel grid, write
PLY.  Each stage is usable on its own; ``pipeline`` wires them
together and backs the ``meshsampler`` command.
"""

from .ao import AoConfig, FaceQuality, compute_face_quality, generate_directions
from .cull import (
    CullReport,
    DuplicateGroup,
    cull_internal_faces,
    find_duplicate_groups,
)
from .errors import (
    DegenerateGeometryError,
    EmptyInputError,
    EmptySurfaceError,
    MeshParseError,
    MeshSamplerError,
    PlyParseError,
    TextureLoadError,
)
from .geometry import (
    Bvh,
    Ray,
    Triangle,
    build_bvh,
    bvh_from_mesh,
    face_area,
    face_normal,
    occluded,
    uniform_barycentric,
)
from .mesh_io import (
    DEFAULT_DIFFUSE,
    Face,
    Material,
    Mesh,
    PointCloud,
    TextureImage,
    load_obj,
    load_ply,
    load_texture,
    parse_mtl,
    parse_obj,
    read_ply,
    save_ply,
    write_ply,
)
from .pipeline import (
    ManifestEntry,
    PipelineConfig,
    generate_fixture,
    process_batch,
    process_file,
)
from .sample import (
    AreaCdf,
    SampleConfig,
    build_area_cdf,
    lookup_color,
    sample_mesh,
    sample_mesh_with_faces,
    sample_point_on_face,
)
from .voxel import GridTransform, compute_transform, voxelize

__version__ = "0.1.0"

__all__ = [
    "AoConfig",
    "AreaCdf",
    "Bvh",
    "CullReport",
    "DEFAULT_DIFFUSE",
    "DegenerateGeometryError",
    "DuplicateGroup",
    "EmptyInputError",
    "EmptySurfaceError",
    "Face",
    "FaceQuality",
    "GridTransform",
    "ManifestEntry",
    "Material",
    "Mesh",
    "MeshParseError",
    "MeshSamplerError",
    "PipelineConfig",
    "PlyParseError",
    "PointCloud",
    "Ray",
    "SampleConfig",
    "TextureImage",
    "TextureLoadError",
    "Triangle",
    "build_area_cdf",
    "build_bvh",
    "bvh_from_mesh",
    "compute_face_quality",
    "compute_transform",
    "cull_internal_faces",
    "face_area",
    "face_normal",
    "find_duplicate_groups",
    "generate_directions",
    "generate_fixture",
    "load_obj",
    "load_ply",
    "load_texture",
    "lookup_color",
    "occluded",
    "parse_mtl",
    "parse_obj",
    "process_batch",
    "process_file",
    "read_ply",
    "sample_mesh",
    "sample_mesh_with_faces",
    "sample_point_on_face",
    "save_ply",
    "uniform_barycentric",
    "voxelize",
    "write_ply",
]
