"""Per-face visibility quality from simulated view directions.

Viewers sit at infinity along a quasi-uniform set of sphere directions
(spherical Fibonacci lattice).  A (direction, sample point) pair counts
as visible when the face fronts the viewer (normal . direction > 0) and
a ray from the sample point toward the viewer escapes the scene.  The
quality of a face is the visible fraction of all pairs; faces nobody
can see score 0 and are what the culling stage removes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, _rand
from .geometry import Bvh, uniform_barycentric

_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))

# rng stream ids (keyed together with the sample index, so every draw is
# a pure function of (seed, face, sample))
_STREAM_R1 = 1
_STREAM_R2 = 2


@dataclass(frozen=True)
class AoConfig:
    n_directions: int = 256
    samples_per_face: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.n_directions < 1:
            raise ValueError("n_directions must be >= 1")
        if self.samples_per_face < 1:
            raise ValueError("samples_per_face must be >= 1")


@dataclass(eq=False)
class FaceQuality:
    """Visible fraction per face, each value in [0, 1]."""

    values: np.ndarray

    def __len__(self):
        return len(self.values)


def generate_directions(n: int) -> np.ndarray:
    """n unit vectors on the spherical Fibonacci lattice, (n, 3) float64.

    Deterministic and quasi-uniform over the full sphere; the z offsets
    are symmetric so the lattice is balanced (mean vector near zero).
    """
    if n < 1:
        raise ValueError("need at least one direction")
    i = np.arange(n, dtype=np.float64)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = i * _GOLDEN_ANGLE
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _face_frames(mesh):
    """Normals, centroids and validity mask for every face."""
    a, b, c = mesh.triangle_corners()
    cross = np.cross(b - a, c - a)
    norm = np.linalg.norm(cross, axis=1)
    valid = ~mesh.degenerate_mask()
    normals = np.zeros_like(cross)
    nz = norm > 0.0
    normals[nz] = cross[nz] / norm[nz, None]
    centroids = (a + b + c) / 3.0
    return normals, centroids, valid


def _sample_origins(mesh, cfg: AoConfig, normals, centroids, epsilon):
    """(F, S, 3) ray origins: centroid first, then seeded jitter, all
    pushed epsilon along the face normal off the surface."""
    a, b, c = mesh.triangle_corners()
    n_faces = len(a)
    s = cfg.samples_per_face
    origins = np.empty((n_faces, s, 3), dtype=np.float64)
    origins[:, 0, :] = centroids
    counters = np.arange(n_faces, dtype=np.uint64)
    for k in range(1, s):
        r1 = _rand.uniforms(_rand.derive_key(cfg.seed, _STREAM_R1, k), counters)
        r2 = _rand.uniforms(_rand.derive_key(cfg.seed, _STREAM_R2, k), counters)
        wa, wb, wc = uniform_barycentric(r1, r2)
        origins[:, k, :] = wa[:, None] * a + wb[:, None] * b + wc[:, None] * c
    origins += epsilon * normals[:, None, :]
    return origins


def compute_face_quality(mesh, bvh: Bvh, cfg: AoConfig, threads: int = 1) -> FaceQuality:
    """Score every face by its visibility from the direction lattice.

    For each non-degenerate face, each (direction, sample point) pair is
    visible iff the face fronts the direction and the occlusion ray
    escapes; quality = visible pairs / (n_directions * samples_per_face).
    Degenerate faces score 0.  Output is a pure function of
    (mesh, cfg) at any ``threads`` value.

    Parameters
    ----------
    mesh : Mesh
    bvh : Bvh
        Built over exactly this mesh's triangles.
    cfg : AoConfig
    threads : int
        Worker threads for the face loop (1 = serial).
    """
    n_faces = mesh.num_faces
    if n_faces == 0:
        return FaceQuality(values=np.zeros(0, dtype=np.float64))

    normals, centroids, valid = _face_frames(mesh)
    origins = _sample_origins(mesh, cfg, normals, centroids, bvh.epsilon)
    dirs = generate_directions(cfg.n_directions)

    args = (bvh.node_min, bvh.node_max, bvh.left, bvh.right,
            bvh.leaf_start, bvh.leaf_count,
            bvh.tri_a, bvh.tri_b, bvh.tri_c, bvh.tri_face,
            origins, normals, valid, dirs, bvh.epsilon)
    if threads > 1:
        import numba

        # the parallel kernel at 1 effective thread is the serial kernel,
        # minus a pointless compile
        threads = min(threads, numba.config.NUMBA_NUM_THREADS)
    if threads > 1:
        import numba

        numba.set_num_threads(threads)
        counts = _kernels.visibility_counts_parallel(*args)
    else:
        counts = _kernels.visibility_counts_serial(*args)

    total = cfg.n_directions * cfg.samples_per_face
    return FaceQuality(values=counts.astype(np.float64) / total)
