"""
Area-uniform surface sampling with texture colors
=================================================

Points are drawn uniformly over total surface area: a face three times
as large receives three times the points.  Each point's color comes
from the material, either a flat diffuse color or a texture fetched at
the interpolated UV with nearest or bilinear filtering.
"""

import tempfile
from collections import Counter
from pathlib import Path

import numpy as np

from meshsampler import (
    Mesh,
    SampleConfig,
    generate_fixture,
    load_obj,
    sample_mesh,
    sample_mesh_with_faces,
)

# --- proportional face coverage -----------------------------------------
# two triangles with a 1 : 3 area ratio
s = np.sqrt(3.0)
mesh = Mesh(
    vertices=np.array([(0, 0, 0), (1, 0, 0), (0, 1, 0),
                       (0, 0, 1), (s, 0, 1), (0, s, 1)]),
    uvs=np.zeros((0, 2)),
    face_vertices=np.array([(0, 1, 2), (3, 4, 5)], dtype=np.int32),
    face_uvs=np.full((2, 3), -1, dtype=np.int32),
    face_materials=np.full(2, -1, dtype=np.int32),
)
_, faces = sample_mesh_with_faces(mesh, SampleConfig(n_points=100_000, seed=0))
share = np.bincount(faces) / len(faces)
print(f"face areas 0.5 and 1.5 -> point shares {share[0]:.1%} / {share[1]:.1%}")

# --- texture filtering ----------------------------------------------------
# a quad over a 2x2 black/white checker: nearest sampling yields only
# the two texel colors, bilinear blends across texel boundaries
work = Path(tempfile.mkdtemp(prefix="textured_quad_"))
generate_fixture("textured_quad", work)
quad = load_obj(work / "textured_quad.obj")

for mode in ("nearest", "bilinear"):
    cloud = sample_mesh(quad, SampleConfig(n_points=20_000, seed=1,
                                           texture_filter=mode))
    distinct = Counter(map(tuple, cloud.colors.tolist()))
    gray = sum(n for c, n in distinct.items() if 0 < c[0] < 255)
    print(f"{mode:9s}: {len(distinct):4d} distinct colors, "
          f"{gray / len(cloud.points):5.1%} blended grays")
