import numpy as np
import pytest

from meshsampler import (
    AoConfig,
    Mesh,
    Ray,
    bvh_from_mesh,
    compute_face_quality,
    generate_fixture,
    occluded,
)


def square_mesh(materials=None, material=0, uvs=False):
    """Two-triangle unit square in the z=0 plane."""
    vertices = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)]
    uv = [(0, 0), (1, 0), (1, 1), (0, 1)] if uvs else None
    fv = [(0, 1, 2), (0, 2, 3)]
    fuv = fv if uvs else [(-1, -1, -1)] * 2
    fmat = [material if materials else -1] * 2
    return Mesh(
        vertices=np.array(vertices, dtype=np.float64),
        uvs=np.array(uv, dtype=np.float64) if uv else np.zeros((0, 2)),
        face_vertices=np.array(fv, dtype=np.int32),
        face_uvs=np.array(fuv, dtype=np.int32),
        face_materials=np.array(fmat, dtype=np.int32),
        materials=list(materials) if materials else [],
    )


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    """Directory holding all three generated OBJ test scenes."""
    d = tmp_path_factory.mktemp("fixtures")
    for kind in ("doubled_cube", "nested_cubes", "textured_quad"):
        generate_fixture(kind, d)
    return d


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jitted ray kernels once, before anything is timed."""
    mesh = square_mesh()
    bvh = bvh_from_mesh(mesh)
    occluded(bvh, Ray(origin=(0.5, 0.5, 1.0), direction=(0.0, 0.0, 1.0)))
    compute_face_quality(mesh, bvh, AoConfig(n_directions=8, samples_per_face=2))
