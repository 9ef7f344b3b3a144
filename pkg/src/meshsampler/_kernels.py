"""JIT-compiled ray kernels (numba).

Hot loops only: Möller-Trumbore ray/triangle intersection, slab
ray/box test, any-hit BVH traversal, and the per-face visibility
counter.  Everything here is deterministic and free of shared mutable
state; the parallel counter writes one disjoint output slot per face,
so results are identical at any thread count.
"""

import numpy as np
from numba import njit, prange

_STACK_DEPTH = 128


@njit(cache=True, inline="always")
def _ray_triangle_t(ox, oy, oz, dx, dy, dz, ax, ay, az, bx, by, bz, cx, cy, cz):
    """Hit parameter t of ray vs triangle, or -1.0 for a miss.

    Boundary-inclusive barycentric test: edge and vertex hits count.
    """
    e1x = bx - ax
    e1y = by - ay
    e1z = bz - az
    e2x = cx - ax
    e2y = cy - ay
    e2z = cz - az
    # p = d x e2
    px = dy * e2z - dz * e2y
    py = dz * e2x - dx * e2z
    pz = dx * e2y - dy * e2x
    det = e1x * px + e1y * py + e1z * pz
    if det > -1e-300 and det < 1e-300:
        return -1.0
    inv = 1.0 / det
    tx = ox - ax
    ty = oy - ay
    tz = oz - az
    u = (tx * px + ty * py + tz * pz) * inv
    if u < 0.0 or u > 1.0:
        return -1.0
    # q = t x e1
    qx = ty * e1z - tz * e1y
    qy = tz * e1x - tx * e1z
    qz = tx * e1y - ty * e1x
    v = (dx * qx + dy * qy + dz * qz) * inv
    if v < 0.0 or u + v > 1.0:
        return -1.0
    return (e2x * qx + e2y * qy + e2z * qz) * inv


@njit(cache=True, inline="always")
def _box_hit(bminx, bminy, bminz, bmaxx, bmaxy, bmaxz,
             ox, oy, oz, dx, dy, dz, t_lo, t_hi):
    """True if the ray's [t_lo, t_hi] interval overlaps the box."""
    tmin = t_lo
    tmax = t_hi
    for axis in range(3):
        if axis == 0:
            o = ox
            d = dx
            lo = bminx
            hi = bmaxx
        elif axis == 1:
            o = oy
            d = dy
            lo = bminy
            hi = bmaxy
        else:
            o = oz
            d = dz
            lo = bminz
            hi = bmaxz
        if d > -1e-300 and d < 1e-300:
            if o < lo or o > hi:
                return False
        else:
            inv = 1.0 / d
            t1 = (lo - o) * inv
            t2 = (hi - o) * inv
            if t1 > t2:
                t1, t2 = t2, t1
            if t1 > tmin:
                tmin = t1
            if t2 < tmax:
                tmax = t2
            if tmin > tmax:
                return False
    return True


@njit(cache=True, nogil=True)
def occluded_query(nmin, nmax, left, right, leaf_start, leaf_count,
                   ta, tb, tc, tface,
                   ox, oy, oz, dx, dy, dz, t_max, ignore_face, eps):
    """Any-hit query: does any triangle with face index != ignore_face
    intersect the ray with t in (eps, t_max)?"""
    if nmin.shape[0] == 0:
        return False
    stack = np.empty(_STACK_DEPTH, dtype=np.int32)
    stack[0] = 0
    top = 1
    while top > 0:
        top -= 1
        node = stack[top]
        if not _box_hit(nmin[node, 0], nmin[node, 1], nmin[node, 2],
                        nmax[node, 0], nmax[node, 1], nmax[node, 2],
                        ox, oy, oz, dx, dy, dz, eps, t_max):
            continue
        if leaf_count[node] > 0:
            s = leaf_start[node]
            for k in range(s, s + leaf_count[node]):
                if tface[k] == ignore_face:
                    continue
                t = _ray_triangle_t(ox, oy, oz, dx, dy, dz,
                                    ta[k, 0], ta[k, 1], ta[k, 2],
                                    tb[k, 0], tb[k, 1], tb[k, 2],
                                    tc[k, 0], tc[k, 1], tc[k, 2])
                if t > eps and t < t_max:
                    return True
        else:
            stack[top] = left[node]
            stack[top + 1] = right[node]
            top += 2
    return False


@njit(cache=True, inline="always")
def _face_visible_pairs(f, nmin, nmax, left, right, leaf_start, leaf_count,
                        ta, tb, tc, tface, origins, normals, dirs, eps):
    nx = normals[f, 0]
    ny = normals[f, 1]
    nz = normals[f, 2]
    n_samples = origins.shape[1]
    visible = 0
    for j in range(dirs.shape[0]):
        dx = dirs[j, 0]
        dy = dirs[j, 1]
        dz = dirs[j, 2]
        if nx * dx + ny * dy + nz * dz <= 0.0:
            continue  # back-facing toward this viewer
        for s in range(n_samples):
            if not occluded_query(nmin, nmax, left, right, leaf_start, leaf_count,
                                  ta, tb, tc, tface,
                                  origins[f, s, 0], origins[f, s, 1], origins[f, s, 2],
                                  dx, dy, dz, np.inf, f, eps):
                visible += 1
    return visible


@njit(cache=True, nogil=True)
def visibility_counts_serial(nmin, nmax, left, right, leaf_start, leaf_count,
                             ta, tb, tc, tface, origins, normals, valid, dirs, eps):
    n_faces = origins.shape[0]
    counts = np.zeros(n_faces, dtype=np.int64)
    for f in range(n_faces):
        if valid[f]:
            counts[f] = _face_visible_pairs(f, nmin, nmax, left, right,
                                            leaf_start, leaf_count,
                                            ta, tb, tc, tface,
                                            origins, normals, dirs, eps)
    return counts


@njit(cache=True, parallel=True)
def visibility_counts_parallel(nmin, nmax, left, right, leaf_start, leaf_count,
                               ta, tb, tc, tface, origins, normals, valid, dirs, eps):
    n_faces = origins.shape[0]
    counts = np.zeros(n_faces, dtype=np.int64)
    for f in prange(n_faces):
        if valid[f]:
            counts[f] = _face_visible_pairs(f, nmin, nmax, left, right,
                                            leaf_start, leaf_count,
                                            ta, tb, tc, tface,
                                            origins, normals, dirs, eps)
    return counts
