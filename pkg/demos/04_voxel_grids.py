"""
Quantizing a cloud to a cubic voxel grid
========================================

The cloud's bounding box is scaled so its longest axis spans the grid,
shorter axes are centered, every point snaps to the nearest integer
cell, and points landing in the same cell merge into one voxel whose
color is the average of theirs.
"""

import numpy as np

from meshsampler import PointCloud, compute_transform, voxelize

# --- the transform ---------------------------------------------------------
cloud = PointCloud(
    points=np.array([(0, 0, 0), (2, 1, 1)], dtype=np.float32),
    colors=np.zeros((2, 3), dtype=np.uint8),
)
tf = compute_transform(cloud, resolution=11)
print(f"bbox 2 x 1 x 1 into an 11-grid: scale {tf.scale}, offset {tf.offset}")
print("corner images:", tf.apply(cloud.points).tolist())
# the short axes land at 2.5 .. 7.5, centered in [0, 10]

# --- color merging ----------------------------------------------------------
# two coincident points, black and white, become one mid-gray voxel
pair = PointCloud(
    points=np.zeros((2, 3), dtype=np.float32),
    colors=np.array([(0, 0, 0), (255, 255, 255)], dtype=np.uint8),
)
vox = voxelize(pair, resolution=8)
print(f"\nblack + white at one spot -> {len(vox.points)} voxel, "
      f"color {tuple(int(c) for c in vox.colors[0])}")

# --- resolution sweep --------------------------------------------------------
# points on a sphere surface: finer grids merge less
rng = np.random.default_rng(0)
d = rng.normal(size=(50_000, 3))
d /= np.linalg.norm(d, axis=1, keepdims=True)
sphere = PointCloud(points=d.astype(np.float32),
                    colors=rng.integers(0, 256, size=(50_000, 3), dtype=np.uint8))

print("\n  grid   voxels   points per voxel")
for r in (16, 32, 64, 128, 256):
    v = voxelize(sphere, r)
    print(f"  {r:4d}  {len(v.points):7d}   {50_000 / len(v.points):8.2f}")
