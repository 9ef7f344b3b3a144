"""Point-cloud voxelization onto a cubic grid.

The cloud's bounding box is scaled so its longest axis spans
``resolution - 1`` cells, shorter axes are centered, and every point is
quantized with round-half-up.  Points landing in the same cell merge
into one output point carrying the mean color (again rounded half-up).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError
from .mesh_io import PointCloud


@dataclass(frozen=True)
class GridTransform:
    """Affine map world -> grid, ``p' = (p - offset) * scale``."""

    scale: float
    offset: np.ndarray  # (3,) float64
    resolution: int

    def apply(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        return (points - self.offset) * self.scale


def compute_transform(cloud: PointCloud, resolution: int) -> GridTransform:
    """Scale the longest bounding-box axis to [0, resolution-1] and
    center the others; a degenerate (single-position) cloud maps to the
    grid center."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    if len(cloud) == 0:
        raise EmptyInputError("cannot voxelize an empty point cloud")
    pts = cloud.points.astype(np.float64)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    extent = hi - lo
    longest = float(extent.max())
    if longest <= 0.0:
        scale = 1.0
    else:
        scale = (resolution - 1) / longest
    # centering shift per axis, folded into the offset
    shift = ((resolution - 1) - extent * scale) / 2.0
    return GridTransform(scale=scale, offset=lo - shift / scale, resolution=resolution)


def voxelize(cloud: PointCloud, resolution: int) -> PointCloud:
    """Quantize a cloud onto a ``resolution``-sided cubic grid.

    Grid coordinates are round-half-up of the transformed positions;
    cells are deduplicated and colors averaged channel-wise (mean
    rounded half-up).  Output points are the integer cell coordinates
    in lexicographic (x, y, z) order, and ``grid_resolution`` is set so
    the grid survives a PLY round trip.

    Raises
    ------
    EmptyInputError
        If the cloud has no points.
    """
    tf = compute_transform(cloud, resolution)
    grid = np.floor(tf.apply(cloud.points) + 0.5).astype(np.int64)
    np.clip(grid, 0, resolution - 1, out=grid)

    r = np.int64(resolution)
    keys = (grid[:, 0] * r + grid[:, 1]) * r + grid[:, 2]
    order = np.argsort(keys, kind="stable")
    uniq_keys, start = np.unique(keys[order], return_index=True)
    counts = np.diff(np.append(start, len(keys)))

    sums = np.add.reduceat(cloud.colors[order].astype(np.float64), start, axis=0)
    mean = np.floor(sums / counts[:, None] + 0.5)
    colors = np.clip(mean, 0, 255).astype(np.uint8)

    cells = np.empty((len(uniq_keys), 3), dtype=np.int64)
    cells[:, 2] = uniq_keys % r
    rest = uniq_keys // r
    cells[:, 1] = rest % r
    cells[:, 0] = rest // r
    return PointCloud(
        points=cells.astype(np.float32),
        colors=colors,
        grid_resolution=resolution,
    )
