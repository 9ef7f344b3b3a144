import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from meshsampler import (
    DEFAULT_DIFFUSE,
    EmptySurfaceError,
    Material,
    Mesh,
    SampleConfig,
    TextureImage,
    Triangle,
    build_area_cdf,
    load_obj,
    lookup_color,
    sample_mesh,
    sample_mesh_with_faces,
    sample_point_on_face,
)

from oracles import barycentric_in_plane_triangle
from test_ao import mesh_of


def rgb_2x2():
    """Four distinct texels: R G / B W, row 0 on top."""
    px = np.array([[[255, 0, 0], [0, 255, 0]],
                   [[0, 0, 255], [255, 255, 255]]], dtype=np.uint8)
    return TextureImage(width=2, height=2, pixels=px)


def textured_triangle(uv_corners, texture=None):
    """One triangle in z=0 whose UV corners are given explicitly."""
    tex = texture if texture is not None else rgb_2x2()
    return Mesh(
        vertices=np.array([(0, 0, 0), (1, 0, 0), (0, 1, 0)], dtype=np.float64),
        uvs=np.asarray(uv_corners, dtype=np.float64),
        face_vertices=np.array([(0, 1, 2)], dtype=np.int32),
        face_uvs=np.array([(0, 1, 2)], dtype=np.int32),
        face_materials=np.array([0], dtype=np.int32),
        materials=[Material(name="tex", texture=tex)],
    )


# --------------------------------------------------------------------------
# area table

def test_cdf_accumulates_areas():
    mesh = mesh_of([(0, 0, 0), (2, 0, 0), (0, 1, 0),
                    (0, 0, 1), (3, 0, 1), (0, 2, 1)],
                   [(0, 1, 2), (3, 4, 5)])
    cdf = build_area_cdf(mesh)
    assert np.allclose(cdf.cumulative, [1.0, 4.0])
    assert cdf.total_area == pytest.approx(4.0)
    assert cdf.face_map.tolist() == [0, 1]


def test_cdf_skips_degenerate_faces():
    mesh = mesh_of([(0, 0, 0), (1, 0, 0), (0, 1, 0)],
                   [(0, 1, 2), (0, 0, 1), (0, 1, 2)])
    cdf = build_area_cdf(mesh)
    assert cdf.face_map.tolist() == [0, 2]
    assert len(cdf.cumulative) == 2


def test_cdf_rejects_zero_area_mesh():
    mesh = mesh_of([(0, 0, 0), (1, 0, 0)], [(0, 0, 1)])
    with pytest.raises(EmptySurfaceError):
        build_area_cdf(mesh)


# --------------------------------------------------------------------------
# point placement

def test_draw_extremes_hit_corners():
    t = Triangle(a=(0, 0, 0), b=(2, 0, 0), c=(0, 3, 0))
    pos, w = sample_point_on_face(t, 0.0, 0.7)
    assert np.allclose(pos, t.a)
    assert w == (1.0, 0.0, 0.0)
    pos, w = sample_point_on_face(t, 1.0, 0.0)
    assert np.allclose(pos, t.b)
    pos, w = sample_point_on_face(t, 1.0, 1.0)
    assert np.allclose(pos, t.c)


@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True))
def test_weights_are_convex(r1, r2):
    t = Triangle(a=(0, 0, 0), b=(1, 0, 0), c=(0, 1, 0))
    pos, (wa, wb, wc) = sample_point_on_face(t, r1, r2)
    assert wa >= 0 and wb >= 0 and wc >= 0
    assert wa + wb + wc == pytest.approx(1.0)
    assert pos[2] == 0.0  # stays on the source plane


def test_area_proportional_face_choice():
    # areas 0.5 and 1.5: expect a 1:3 split of the samples
    s = np.sqrt(3.0)
    mesh = mesh_of([(0, 0, 0), (1, 0, 0), (0, 1, 0),
                    (0, 0, 1), (s, 0, 1), (0, s, 1)],
                   [(0, 1, 2), (3, 4, 5)])
    n = 100_000
    _, faces = sample_mesh_with_faces(mesh, SampleConfig(n_points=n, seed=3))
    frac0 = np.count_nonzero(faces == 0) / n
    assert abs(frac0 - 0.25) < 0.01
    assert abs((1.0 - frac0) - 0.75) < 0.01


def test_within_face_distribution_is_uniform():
    # the four similar quarter-triangles each catch ~25 % of the points
    mesh = mesh_of([(0, 0, 0), (1, 0, 0), (0, 1, 0)], [(0, 1, 2)])
    n = 100_000
    cloud, _ = sample_mesh_with_faces(mesh, SampleConfig(n_points=n, seed=9))
    wa, wb, wc = barycentric_in_plane_triangle(cloud.points.astype(np.float64)).T
    counts = np.array([
        np.count_nonzero(wa >= 0.5),
        np.count_nonzero(wb >= 0.5),
        np.count_nonzero(wc >= 0.5),
    ])
    counts = np.append(counts, n - counts.sum())  # central quarter
    assert np.all(np.abs(counts / n - 0.25) < 0.01)


def test_face_counts_pass_chi_square():
    rng = np.random.default_rng(17)
    verts = rng.uniform(-1, 1, size=(24, 3))
    faces = np.arange(24).reshape(8, 3)
    mesh = mesh_of(verts, faces)
    cdf = build_area_cdf(mesh)
    areas = np.diff(cdf.cumulative, prepend=0.0)

    n = 100_000
    _, picked = sample_mesh_with_faces(mesh, SampleConfig(n_points=n, seed=0))
    observed = np.bincount(picked, minlength=8)[cdf.face_map]
    expected = n * areas / cdf.total_area
    chi2 = float(((observed - expected) ** 2 / expected).sum())
    assert chi2 < stats.chi2.ppf(0.999, df=len(areas) - 1)


def test_points_lie_on_the_source_triangle():
    mesh = mesh_of([(0.2, -1.0, 0.4), (1.4, 0.3, -0.6), (-0.5, 1.1, 0.9)],
                   [(0, 1, 2)])
    cloud = sample_mesh(mesh, SampleConfig(n_points=2_000, seed=4))
    a, b, c = (np.asarray(v, dtype=np.float64) for v in
               [(0.2, -1.0, 0.4), (1.4, 0.3, -0.6), (-0.5, 1.1, 0.9)])
    normal = np.cross(b - a, c - a)
    normal /= np.linalg.norm(normal)
    dist = np.abs((cloud.points.astype(np.float64) - a) @ normal)
    assert dist.max() < 1e-5


def test_sampling_is_deterministic():
    mesh = mesh_of([(0, 0, 0), (1, 0, 0), (0, 1, 0)], [(0, 1, 2)])
    one = sample_mesh(mesh, SampleConfig(n_points=500, seed=11))
    two = sample_mesh(mesh, SampleConfig(n_points=500, seed=11))
    assert np.array_equal(one.points, two.points)
    assert np.array_equal(one.colors, two.colors)

    other = sample_mesh(mesh, SampleConfig(n_points=500, seed=12))
    assert not np.array_equal(one.points, other.points)


def test_config_validation():
    with pytest.raises(ValueError):
        SampleConfig(n_points=0)
    with pytest.raises(ValueError):
        SampleConfig(n_points=10, texture_filter="cubic")
    with pytest.raises(ValueError):
        SampleConfig(n_points=10, wrap="mirror")


# --------------------------------------------------------------------------
# color lookup

def test_flat_diffuse_rounds_half_up():
    from conftest import square_mesh
    mesh = square_mesh(materials=[Material(diffuse=(0.5, 0.5, 0.5))])
    color = lookup_color(mesh, 0, (1 / 3, 1 / 3, 1 / 3))
    assert color.tolist() == [128, 128, 128]  # 127.5 rounds up


def test_missing_material_uses_default_gray():
    from conftest import square_mesh
    mesh = square_mesh()
    color = lookup_color(mesh, 0, (0.2, 0.3, 0.5))
    expected = [int(np.floor(c * 255 + 0.5)) for c in DEFAULT_DIFFUSE]
    assert color.tolist() == expected


def test_nearest_lookup_flips_v_by_default():
    # uv corners chosen so the interpolated uv equals the first corner
    mesh = textured_triangle([(0.25, 0.75)] * 3)
    # v=0.75 with the flip lands in the top row
    assert lookup_color(mesh, 0, (1, 0, 0), filter="nearest").tolist() == [255, 0, 0]

    mesh = textured_triangle([(0.25, 0.25)] * 3)
    assert lookup_color(mesh, 0, (1, 0, 0), filter="nearest").tolist() == [0, 0, 255]

    # without the flip, v=0.25 reads the top row instead
    assert lookup_color(mesh, 0, (1, 0, 0), filter="nearest",
                        vflip=False).tolist() == [255, 0, 0]


def test_nearest_interpolates_uv_from_barycentric():
    mesh = textured_triangle([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    # weights (0.1, 0.7, 0.2) -> uv (0.7, 0.2) -> col 1, flipped row 1: white
    color = lookup_color(mesh, 0, (0.1, 0.7, 0.2), filter="nearest")
    assert color.tolist() == [255, 255, 255]


def test_bilinear_at_texel_cross_averages_neighbors():
    checker = TextureImage(width=2, height=2, pixels=np.array(
        [[[0, 0, 0], [255, 255, 255]],
         [[255, 255, 255], [0, 0, 0]]], dtype=np.uint8))
    mesh = textured_triangle([(0.5, 0.5)] * 3, texture=checker)
    color = lookup_color(mesh, 0, (1, 0, 0), filter="bilinear")
    assert color.tolist() == [128, 128, 128]  # mean of the four texels


def test_bilinear_at_texel_center_is_exact():
    mesh = textured_triangle([(0.25, 0.75)] * 3)
    color = lookup_color(mesh, 0, (1, 0, 0), filter="bilinear")
    assert color.tolist() == [255, 0, 0]


def test_repeat_wrap_tiles_the_texture():
    mesh = textured_triangle([(1.25, 0.75)] * 3)
    color = lookup_color(mesh, 0, (1, 0, 0), filter="nearest", wrap="repeat")
    assert color.tolist() == [255, 0, 0]

    mesh = textured_triangle([(-0.75, 0.75)] * 3)
    color = lookup_color(mesh, 0, (1, 0, 0), filter="nearest", wrap="repeat")
    assert color.tolist() == [255, 0, 0]


def test_clamp_wrap_sticks_to_the_border():
    mesh = textured_triangle([(1.25, 0.75)] * 3)
    color = lookup_color(mesh, 0, (1, 0, 0), filter="nearest", wrap="clamp")
    assert color.tolist() == [0, 255, 0]  # u clamps to the right column


def test_face_without_uvs_falls_back_to_diffuse():
    mesh = textured_triangle([(0.25, 0.75)] * 3)
    mesh.face_uvs[0] = -1
    mesh.materials[0] = Material(diffuse=(1.0, 0.0, 0.0), texture=rgb_2x2())
    color = lookup_color(mesh, 0, (1, 0, 0), filter="nearest")
    assert color.tolist() == [255, 0, 0]


def test_untextured_material_colors_every_sample():
    from conftest import square_mesh
    mesh = square_mesh(materials=[Material(diffuse=(1.0, 0.0, 0.0))])
    cloud = sample_mesh(mesh, SampleConfig(n_points=1_000, seed=2))
    assert (cloud.colors == (255, 0, 0)).all()


def test_checker_fixture_samples_only_its_two_colors(fixture_dir):
    mesh = load_obj(fixture_dir / "textured_quad.obj")
    cfg = SampleConfig(n_points=5_000, seed=0, texture_filter="nearest")
    cloud = sample_mesh(mesh, cfg)
    black = (cloud.colors == 0).all(axis=1)
    white = (cloud.colors == 255).all(axis=1)
    assert (black | white).all()
    assert black.any() and white.any()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 400))
def test_cloud_shape_matches_request(seed, n):
    mesh = mesh_of([(0, 0, 0), (1, 0, 0), (0, 1, 0)], [(0, 1, 2)])
    cloud = sample_mesh(mesh, SampleConfig(n_points=n, seed=seed))
    assert cloud.points.shape == (n, 3)
    assert cloud.colors.shape == (n, 3)
    assert cloud.points.dtype == np.float32
    assert cloud.colors.dtype == np.uint8
