"""Removal of coincident duplicate faces and invisible faces.

ShapeNet-style exports often stack two faces on the same three
vertices with opposite windings and different colors; a renderer
back-face-culls one of them, but a sampler sees both.  This module
groups faces that occupy the same position (by vertex index or by
quantized vertex position), keeps the highest-visibility face of each
group, and optionally drops every face no outside observer can see.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ao import FaceQuality
from .mesh_io import Mesh

# positional duplicate detection snaps vertices to this fraction of the
# bounding-box diagonal
POSITION_QUANTUM_SCALE = 1e-6


@dataclass(eq=False)
class DuplicateGroup:
    """Faces sharing one canonical position key (singletons included)."""

    key: tuple
    members: list[int]


@dataclass(frozen=True)
class CullReport:
    """What the cull removed.

    ``faces_removed`` counts only duplicate-resolution losers, i.e. it
    always equals sum(len(members) - 1) over multi-member groups;
    invisible faces removed on top of that (group winners or singletons
    with quality 0) are counted in ``invisible_removed``.
    """

    groups_found: int = 0
    faces_removed: int = 0
    kept_by_tie_break: int = 0
    invisible_removed: int = 0


def _position_keys(mesh: Mesh) -> np.ndarray:
    """Quantized vertex positions encoded one int64 per vertex."""
    v = mesh.vertices
    if len(v) == 0:
        return np.zeros(0, dtype=np.int64)
    vmin = v.min(axis=0)
    diag = float(np.linalg.norm(v.max(axis=0) - vmin))
    step = POSITION_QUANTUM_SCALE * diag if diag > 0.0 else 1.0
    q = np.floor((v - vmin) / step + 0.5).astype(np.int64)
    # each axis fits in 21 bits: offsets from bbox_min are at most
    # diag / step = 1e6 < 2^21
    return (q[:, 0] << 42) | (q[:, 1] << 21) | q[:, 2]


def find_duplicate_groups(mesh: Mesh, mode: str = "by_position") -> list[DuplicateGroup]:
    """Partition all faces into groups occupying the same position.

    ``by_index`` keys a face by its sorted vertex index triple;
    ``by_position`` by the sorted triple of quantized vertex positions,
    so duplicated vertex records still collide.  Groups are returned in
    first-appearance order with ascending member lists.
    """
    if mode == "by_index":
        per_vertex = None
    elif mode == "by_position":
        per_vertex = _position_keys(mesh)
    else:
        raise ValueError(f"unknown duplicate mode {mode!r}")

    fv = mesh.face_vertices
    if per_vertex is None:
        keyed = np.sort(fv.astype(np.int64), axis=1)
    else:
        keyed = np.sort(per_vertex[fv], axis=1)

    groups: dict[tuple, list[int]] = {}
    for i, row in enumerate(keyed):
        groups.setdefault((int(row[0]), int(row[1]), int(row[2])), []).append(i)
    return [DuplicateGroup(key=k, members=m) for k, m in groups.items()]


def cull_internal_faces(
    mesh: Mesh,
    quality: FaceQuality,
    groups: list[DuplicateGroup],
    remove_invisible: bool = True,
) -> tuple[Mesh, CullReport]:
    """Keep the best face of every duplicate group; drop the invisible.

    In each group the face with maximum quality survives (ties broken
    by lowest face index).  With ``remove_invisible`` (default), any
    remaining face with quality exactly 0 is dropped too, since no
    outside observer can see it.  Vertices are never removed and the
    surviving faces keep their relative order.
    """
    q = np.asarray(quality.values, dtype=np.float64)
    if len(q) != mesh.num_faces:
        raise ValueError("quality length does not match face count")

    keep = np.ones(mesh.num_faces, dtype=bool)
    groups_found = 0
    faces_removed = 0
    kept_by_tie_break = 0
    for g in groups:
        if len(g.members) < 2:
            continue
        groups_found += 1
        member_q = q[g.members]
        best = g.members[int(np.argmax(member_q))]  # argmax -> lowest index on ties
        if (member_q == member_q.max()).sum() > 1:
            kept_by_tie_break += 1
        for m in g.members:
            if m != best:
                keep[m] = False
                faces_removed += 1

    invisible_removed = 0
    if remove_invisible:
        invisible = keep & (q == 0.0)
        invisible_removed = int(invisible.sum())
        keep &= ~invisible

    report = CullReport(
        groups_found=groups_found,
        faces_removed=faces_removed,
        kept_by_tie_break=kept_by_tie_break,
        invisible_removed=invisible_removed,
    )
    return mesh.replace_faces(np.flatnonzero(keep)), report
