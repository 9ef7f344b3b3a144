import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meshsampler import (
    DegenerateGeometryError,
    Ray,
    Triangle,
    build_bvh,
    face_area,
    face_normal,
    occluded,
    uniform_barycentric,
)
from meshsampler.geometry import EPSILON_SCALE, LEAF_SIZE

from oracles import ray_hits_any

# unit cube as 12 outward-wound triangles, written out by hand so the
# package's own fixture generator is not part of the arrangement
CUBE_CORNERS = np.array([
    (0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0),
    (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1),
], dtype=np.float64)
CUBE_FACES = [
    (0, 3, 2), (0, 2, 1),  # z = 0
    (4, 5, 6), (4, 6, 7),  # z = 1
    (0, 1, 5), (0, 5, 4),  # y = 0
    (2, 3, 7), (2, 7, 6),  # y = 1
    (0, 4, 7), (0, 7, 3),  # x = 0
    (1, 2, 6), (1, 6, 5),  # x = 1
]


def cube_triangles(scale=1.0, offset=(0.0, 0.0, 0.0), face_base=0):
    corners = CUBE_CORNERS * scale + np.asarray(offset, dtype=np.float64)
    return [
        Triangle(corners[i], corners[j], corners[k], face_index=face_base + n)
        for n, (i, j, k) in enumerate(CUBE_FACES)
    ]


def random_triangles(rng, n, lo=-1.0, hi=1.0):
    pts = rng.uniform(lo, hi, size=(n, 3, 3))
    return [Triangle(p[0], p[1], p[2], face_index=i) for i, p in enumerate(pts)]


def unit_dirs(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# --------------------------------------------------------------------------
# triangle math

def test_face_normal_right_hand_rule():
    t = Triangle((0, 0, 0), (1, 0, 0), (0, 1, 0))
    assert np.allclose(face_normal(t), (0, 0, 1))


def test_face_normal_flips_with_winding():
    t = Triangle((0, 0, 0), (0, 1, 0), (1, 0, 0))
    assert np.allclose(face_normal(t), (0, 0, -1))


def test_face_normal_degenerate_raises():
    with pytest.raises(DegenerateGeometryError):
        face_normal(Triangle((0, 0, 0), (1, 1, 1), (2, 2, 2)))


def test_face_area_examples():
    assert face_area(Triangle((0, 0, 0), (1, 0, 0), (0, 1, 0))) == 0.5
    assert face_area(Triangle((0, 0, 0), (1, 1, 1), (2, 2, 2))) == 0.0


@given(st.floats(0.1, 10.0))
def test_face_area_scaling_law(s):
    t = Triangle((0.1, 0.2, 0.3), (1.1, 0.1, -0.2), (0.3, 0.9, 0.5))
    scaled = Triangle(t.a * s, t.b * s, t.c * s)
    assert face_area(scaled) == pytest.approx(face_area(t) * s * s, rel=1e-12)


coords = st.floats(-100, 100)
point = st.tuples(coords, coords, coords)


@settings(max_examples=100)
@given(point, point, point)
def test_face_normal_orthogonal_to_edges(a, b, c):
    t = Triangle(a, b, c)
    if face_area(t) < 1e-6:
        return
    n = face_normal(t)
    assert abs(float(n @ (t.b - t.a))) < 1e-6 * np.linalg.norm(t.b - t.a)
    assert abs(float(n @ (t.c - t.a))) < 1e-6 * np.linalg.norm(t.c - t.a)


def test_uniform_barycentric_limits():
    assert uniform_barycentric(0.0, 0.5) == (1.0, 0.0, 0.0)
    wa, wb, wc = uniform_barycentric(1.0, 0.0)
    assert (wa, wb, wc) == (0.0, 1.0, 0.0)
    assert uniform_barycentric(1.0, 1.0)[2] == 1.0


@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True))
def test_uniform_barycentric_weights_valid(r1, r2):
    wa, wb, wc = uniform_barycentric(r1, r2)
    assert wa >= 0 and wb >= 0 and wc >= 0
    assert abs(wa + wb + wc - 1.0) < 1e-9


def test_ray_requires_unit_direction():
    with pytest.raises(ValueError):
        Ray(origin=(0, 0, 0), direction=(0, 0, 2))
    Ray(origin=(0, 0, 0), direction=(0, 0, 1))  # fine


# --------------------------------------------------------------------------
# BVH structure

def test_empty_bvh_everything_unoccluded():
    bvh = build_bvh([])
    assert bvh.num_triangles == 0
    assert not occluded(bvh, Ray((0, 0, 0), (0, 0, 1)))


def test_single_triangle_is_one_leaf():
    bvh = build_bvh([Triangle((0, 0, 0), (1, 0, 0), (0, 1, 0))])
    assert bvh.num_nodes == 1
    assert bvh.leaf_count[0] == 1


def _walk_leaves(bvh, node=0):
    if bvh.leaf_count[node] > 0:
        yield node
    else:
        yield from _walk_leaves(bvh, bvh.left[node])
        yield from _walk_leaves(bvh, bvh.right[node])


def test_bvh_partitions_triangles_and_bounds_them():
    rng = np.random.default_rng(7)
    tris = random_triangles(rng, 300)
    bvh = build_bvh(tris)

    covered = []
    for leaf in _walk_leaves(bvh):
        s, n = int(bvh.leaf_start[leaf]), int(bvh.leaf_count[leaf])
        assert n <= LEAF_SIZE
        covered.extend(range(s, s + n))
    assert sorted(covered) == list(range(300))  # each triangle in exactly one leaf
    assert sorted(bvh.order.tolist()) == list(range(300))

    # every node's box contains its triangles (checked at the leaves;
    # parents contain children by construction order of min/max)
    for leaf in _walk_leaves(bvh):
        s, n = int(bvh.leaf_start[leaf]), int(bvh.leaf_count[leaf])
        pts = np.concatenate([bvh.tri_a[s:s + n], bvh.tri_b[s:s + n], bvh.tri_c[s:s + n]])
        assert (pts >= bvh.node_min[leaf] - 1e-12).all()
        assert (pts <= bvh.node_max[leaf] + 1e-12).all()


def test_bvh_build_is_deterministic():
    rng = np.random.default_rng(11)
    tris = random_triangles(rng, 100)
    b1 = build_bvh(tris)
    b2 = build_bvh(tris)
    assert np.array_equal(b1.order, b2.order)
    assert np.array_equal(b1.node_min, b2.node_min)
    assert np.array_equal(b1.tri_face, b2.tri_face)


def test_epsilon_tracks_scene_diagonal():
    bvh = build_bvh(cube_triangles())
    assert bvh.epsilon == pytest.approx(EPSILON_SCALE * np.sqrt(3.0))


# --------------------------------------------------------------------------
# occlusion queries

def test_cube_centroid_outward_is_unoccluded():
    tris = cube_triangles()
    bvh = build_bvh(tris)
    # from the center of the z=0 face, looking away from the cube
    assert not occluded(bvh, Ray((0.4, 0.4, 0.0), (0, 0, -1)), ignore_face=0)


def test_inner_box_sees_outer_box():
    tris = cube_triangles() + cube_triangles(scale=0.5, offset=(0.25, 0.25, 0.25),
                                             face_base=12)
    bvh = build_bvh(tris)
    # from the inner cube's z=0.25 face, any direction hits the outer shell
    origin = (0.5, 0.5, 0.25)
    assert occluded(bvh, Ray(origin, (0, 0, -1)), ignore_face=12)
    assert occluded(bvh, Ray(origin, (0, 0, 1)), ignore_face=12)


def test_ignore_face_suppresses_the_only_hit():
    tris = [Triangle((0, 0, 1), (1, 0, 1), (0, 1, 1), face_index=5)]
    bvh = build_bvh(tris)
    ray = Ray((0.2, 0.2, 0), (0, 0, 1))
    assert occluded(bvh, ray, ignore_face=-1)
    assert not occluded(bvh, ray, ignore_face=5)


def test_t_max_bounds_the_hit_window():
    tris = [Triangle((-1, -1, 2), (3, -1, 2), (-1, 3, 2), face_index=0)]
    bvh = build_bvh(tris)
    assert not occluded(bvh, Ray((0, 0, 0), (0, 0, 1), t_max=1.5))
    assert occluded(bvh, Ray((0, 0, 0), (0, 0, 1), t_max=2.5))


def test_occluded_matches_brute_force_oracle():
    rng = np.random.default_rng(2024)
    for mesh_i in range(5):
        n_tris = int(rng.integers(1, 501))
        tris = random_triangles(rng, n_tris)
        bvh = build_bvh(tris)
        a = np.array([t.a for t in tris])
        b = np.array([t.b for t in tris])
        c = np.array([t.c for t in tris])
        faces = np.arange(n_tris)

        origins = rng.uniform(-1.2, 1.2, size=(200, 3))
        dirs = unit_dirs(rng, 200)
        for k in range(200):
            t_max = np.inf if k % 3 else float(rng.uniform(0.1, 3.0))
            ignore = -1 if k % 2 else int(rng.integers(0, n_tris))
            got = occluded(bvh, Ray(origins[k], dirs[k], t_max=t_max), ignore_face=ignore)
            want = ray_hits_any(a, b, c, faces, origins[k], dirs[k],
                                t_max, ignore, bvh.epsilon)
            assert got == want, f"mesh {mesh_i} ray {k}"


def test_large_bvh_agrees_with_oracle():
    rng = np.random.default_rng(99)
    tris = random_triangles(rng, 10_000)
    bvh = build_bvh(tris)
    a = np.array([t.a for t in tris])
    b = np.array([t.b for t in tris])
    c = np.array([t.c for t in tris])
    faces = np.arange(10_000)

    origins = rng.uniform(-1.2, 1.2, size=(100, 3))
    dirs = unit_dirs(rng, 100)
    for k in range(100):
        got = occluded(bvh, Ray(origins[k], dirs[k]))
        want = ray_hits_any(a, b, c, faces, origins[k], dirs[k],
                            np.inf, -1, bvh.epsilon)
        assert got == want
