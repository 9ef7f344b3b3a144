"""Triangle math and a BVH for occlusion ray queries.

The BVH is a binary tree of axis-aligned boxes built by median split
on the longest axis of the centroid bounds, at most 4 triangles per
leaf.  Construction is a pure function of the triangle order, and
`occluded` is read-only, so one tree can serve any number of
concurrent query threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateGeometryError

LEAF_SIZE = 4
# self-hit suppression: hits closer than this fraction of the scene
# bounding-box diagonal do not count as occlusion
EPSILON_SCALE = 1e-4


@dataclass(eq=False)
class Triangle:
    """One triangle in model space, tagged with its mesh face index."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    face_index: int = 0

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=np.float64).reshape(3)
        self.b = np.asarray(self.b, dtype=np.float64).reshape(3)
        self.c = np.asarray(self.c, dtype=np.float64).reshape(3)


@dataclass(eq=False)
class Ray:
    """Origin plus unit direction; t_max bounds the hit parameter."""

    origin: np.ndarray
    direction: np.ndarray
    t_max: float = np.inf

    def __post_init__(self):
        self.origin = np.asarray(self.origin, dtype=np.float64).reshape(3)
        self.direction = np.asarray(self.direction, dtype=np.float64).reshape(3)
        norm = float(np.linalg.norm(self.direction))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"ray direction must be unit length, |d| = {norm}")


def face_normal(t: Triangle) -> np.ndarray:
    """Unit normal of the triangle; winding determines the sign.

    Raises
    ------
    DegenerateGeometryError
        If the corners are collinear (zero area).
    """
    n = np.cross(t.b - t.a, t.c - t.a)
    norm = float(np.linalg.norm(n))
    if norm == 0.0:
        raise DegenerateGeometryError("zero-area triangle has no normal")
    return n / norm


def face_area(t: Triangle) -> float:
    """Triangle area in model units squared (0 for degenerate input)."""
    return float(np.linalg.norm(np.cross(t.b - t.a, t.c - t.a))) / 2.0


def uniform_barycentric(r1, r2):
    """Map uniform [0,1) pairs to barycentric weights uniform over a triangle.

    The square-root warp: w_a = 1-sqrt(r1), w_b = sqrt(r1)(1-r2),
    w_c = sqrt(r1) r2.  Vectorizes over arrays.
    """
    s = np.sqrt(r1)
    return 1.0 - s, s * (1.0 - r2), s * r2


@dataclass(eq=False)
class Bvh:
    """Flat bounding-volume hierarchy over a triangle set.

    ``node_min/node_max`` bound each node; internal nodes carry child
    indices in ``left/right``, leaves a range into the permuted
    triangle arrays ``tri_a/tri_b/tri_c`` (``leaf_count`` > 0 marks a
    leaf).  ``tri_face`` holds each triangle's original mesh face
    index for the ignore-face filter.  ``epsilon`` is the self-hit
    cutoff derived from the scene bounding-box diagonal.
    """

    node_min: np.ndarray
    node_max: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_start: np.ndarray
    leaf_count: np.ndarray
    tri_a: np.ndarray
    tri_b: np.ndarray
    tri_c: np.ndarray
    tri_face: np.ndarray
    epsilon: float = 0.0
    order: np.ndarray = field(default=None, repr=False)  # build permutation

    @property
    def num_triangles(self):
        return len(self.tri_a)

    @property
    def num_nodes(self):
        return len(self.node_min)


def _build_from_arrays(a, b, c, face_index) -> Bvh:
    n = len(a)
    if n == 0:
        empty3 = np.zeros((0, 3), dtype=np.float64)
        zi = np.zeros(0, dtype=np.int32)
        return Bvh(empty3, empty3.copy(), zi, zi.copy(), zi.copy(), zi.copy(),
                   empty3.copy(), empty3.copy(), empty3.copy(),
                   np.zeros(0, dtype=np.int64), epsilon=0.0,
                   order=np.zeros(0, dtype=np.int64))

    tri_min = np.minimum(np.minimum(a, b), c)
    tri_max = np.maximum(np.maximum(a, b), c)
    centroids = (a + b + c) / 3.0

    scene_min = tri_min.min(axis=0)
    scene_max = tri_max.max(axis=0)
    epsilon = EPSILON_SCALE * float(np.linalg.norm(scene_max - scene_min))

    order = np.arange(n, dtype=np.int64)
    node_min: list[np.ndarray] = []
    node_max: list[np.ndarray] = []
    left: list[int] = []
    right: list[int] = []
    leaf_start: list[int] = []
    leaf_count: list[int] = []

    def new_node():
        node_min.append(None)
        node_max.append(None)
        left.append(-1)
        right.append(-1)
        leaf_start.append(0)
        leaf_count.append(0)
        return len(left) - 1

    stack = [(0, n, new_node())]
    while stack:
        lo, hi, ni = stack.pop()
        idx = order[lo:hi]
        node_min[ni] = tri_min[idx].min(axis=0)
        node_max[ni] = tri_max[idx].max(axis=0)
        if hi - lo <= LEAF_SIZE:
            leaf_start[ni] = lo
            leaf_count[ni] = hi - lo
            continue
        cent = centroids[idx]
        axis = int(np.argmax(cent.max(axis=0) - cent.min(axis=0)))
        # stable sort keeps construction a pure function of input order
        order[lo:hi] = idx[np.argsort(cent[:, axis], kind="stable")]
        mid = (lo + hi) // 2
        li = new_node()
        ri = new_node()
        left[ni] = li
        right[ni] = ri
        stack.append((lo, mid, li))
        stack.append((mid, hi, ri))

    return Bvh(
        node_min=np.array(node_min, dtype=np.float64),
        node_max=np.array(node_max, dtype=np.float64),
        left=np.array(left, dtype=np.int32),
        right=np.array(right, dtype=np.int32),
        leaf_start=np.array(leaf_start, dtype=np.int32),
        leaf_count=np.array(leaf_count, dtype=np.int32),
        tri_a=np.ascontiguousarray(a[order]),
        tri_b=np.ascontiguousarray(b[order]),
        tri_c=np.ascontiguousarray(c[order]),
        tri_face=np.ascontiguousarray(np.asarray(face_index, dtype=np.int64)[order]),
        epsilon=epsilon,
        order=order,
    )


def build_bvh(triangles) -> Bvh:
    """Build a BVH over a sequence of :class:`Triangle`.

    An empty sequence yields an empty tree on which every occlusion
    query reports unoccluded.
    """
    tris = list(triangles)
    a = np.array([t.a for t in tris], dtype=np.float64).reshape(-1, 3)
    b = np.array([t.b for t in tris], dtype=np.float64).reshape(-1, 3)
    c = np.array([t.c for t in tris], dtype=np.float64).reshape(-1, 3)
    face = np.array([t.face_index for t in tris], dtype=np.int64)
    return _build_from_arrays(a, b, c, face)


def mesh_triangles(mesh) -> list[Triangle]:
    """Triangles of a mesh (anything with vertices / face_vertices arrays)."""
    a, b, c = mesh.triangle_corners()
    return [Triangle(a[i], b[i], c[i], face_index=i) for i in range(len(a))]


def bvh_from_mesh(mesh) -> Bvh:
    """Build a BVH directly from a mesh without per-triangle objects."""
    a, b, c = mesh.triangle_corners()
    return _build_from_arrays(a, b, c, np.arange(len(a), dtype=np.int64))


def occluded(bvh: Bvh, ray: Ray, ignore_face: int = -1) -> bool:
    """True iff some triangle with face index != ignore_face intersects
    the ray with hit parameter t in (epsilon, t_max)."""
    if bvh.num_nodes == 0:
        return False
    o = ray.origin
    d = ray.direction
    return bool(
        _kernels.occluded_query(
            bvh.node_min, bvh.node_max, bvh.left, bvh.right,
            bvh.leaf_start, bvh.leaf_count,
            bvh.tri_a, bvh.tri_b, bvh.tri_c, bvh.tri_face,
            o[0], o[1], o[2], d[0], d[1], d[2],
            float(ray.t_max), int(ignore_face), bvh.epsilon,
        )
    )
