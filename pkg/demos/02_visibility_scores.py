"""
Scoring faces by outside visibility
===================================

Every face gets a quality in [0, 1]: the fraction of (view direction,
surface sample) pairs from which an observer at infinity sees the
face's front side unobstructed.  A lone triangle scores about 0.5
(half of all directions face its back), and a surface sealed inside
another scores exactly 0.
"""

import numpy as np

from meshsampler import AoConfig, Mesh, bvh_from_mesh, compute_face_quality


def mesh_of(vertices, faces):
    faces = np.asarray(faces, dtype=np.int32)
    return Mesh(
        vertices=np.asarray(vertices, dtype=np.float64),
        uvs=np.zeros((0, 2)),
        face_vertices=faces,
        face_uvs=np.full_like(faces, -1),
        face_materials=np.full(len(faces), -1, dtype=np.int32),
    )


def cube_faces(base=0):
    quads = [(0, 3, 2, 1), (4, 5, 6, 7), (0, 1, 5, 4),
             (2, 3, 7, 6), (0, 4, 7, 3), (1, 2, 6, 5)]
    tris = []
    for a, b, c, d in quads:
        tris += [(a + base, b + base, c + base), (a + base, c + base, d + base)]
    return tris


corners = np.array([(x, y, z) for z in (0, 1) for y in (0, 1)
                    for x in (0, 1)], dtype=np.float64)[[0, 1, 3, 2, 4, 5, 7, 6]]

cfg = AoConfig(n_directions=256, samples_per_face=4)

# a triangle alone in space: visible from one hemisphere only
lone = mesh_of([(0, 0, 0), (1, 0, 0), (0, 1, 0)], [(0, 1, 2)])
q = compute_face_quality(lone, bvh_from_mesh(lone), cfg)
print(f"lone triangle quality: {q.values[0]:.3f} (about 0.5)")

# a small cube sealed inside a big one: its faces see nothing
verts = np.concatenate([corners * 3.0 - 1.0, corners])
faces = cube_faces() + cube_faces(base=8)
nested = mesh_of(verts, faces)
q = compute_face_quality(nested, bvh_from_mesh(nested), cfg).values

print("\n face  where   quality")
for i, value in enumerate(q):
    where = "outer" if i < 12 else "inner"
    print(f"  {i:3d}  {where}   {value:.3f}")

print(f"\ninner faces all score 0: {bool((q[12:] == 0.0).all())}")
print(f"outer faces all visible: {bool((q[:12] > 0.2).all())}")
