"""Mesh-free 3-D shape descriptors of a labelled region.

All quantities are voxel approximations: volume is voxel count times voxel
volume, surface area counts exposed voxel faces (a single 1 mm voxel has
6 mm^2), diameters are pairwise distances between voxel centers in physical
coordinates, and the principal axes come from the population covariance
(divide by N) of those centers.  Fifteen descriptors are emitted; a
single-voxel region is handled degenerately (axes 0, elongation and
flatness defined as 1).
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import EmptyLabelError
from ..volume import LabelMask

SHAPE_FEATURES = (
    "voxel_volume",
    "surface_area",
    "surface_volume_ratio",
    "sphericity",
    "compactness",
    "spherical_disproportion",
    "maximum_3d_diameter",
    "maximum_2d_diameter_axial",
    "maximum_2d_diameter_coronal",
    "maximum_2d_diameter_sagittal",
    "major_axis_length",
    "minor_axis_length",
    "least_axis_length",
    "elongation",
    "flatness",
)

# Above this many points, pairwise diameters go through the convex hull.
_HULL_CUTOFF = 400


def exposed_surface_area(mask: np.ndarray, spacing: tuple[float, float, float]) -> float:
    """Total area of voxel faces adjacent to background or the grid border."""
    mask = np.asarray(mask, dtype=bool)
    sx, sy, sz = spacing
    face_area = (sy * sz, sx * sz, sx * sy)
    total = 0.0
    for axis, area in enumerate(face_area):
        padded = np.pad(mask, [(1, 1) if ax == axis else (0, 0) for ax in range(3)])
        faces = padded.take(range(0, padded.shape[axis] - 1), axis=axis) ^ padded.take(
            range(1, padded.shape[axis]), axis=axis
        )
        total += float(np.count_nonzero(faces)) * area
    return total


def _max_pairwise_distance(points: np.ndarray) -> float:
    """Largest Euclidean distance between any two rows of ``points``."""
    n = points.shape[0]
    if n < 2:
        return 0.0
    if n > _HULL_CUTOFF:
        try:
            from scipy.spatial import ConvexHull

            hull = ConvexHull(points)
            points = points[hull.vertices]
            n = points.shape[0]
        except Exception:
            pass  # degenerate geometry: fall through to brute force
    best = 0.0
    # chunked brute force keeps memory bounded for large regions
    step = 2048
    for i in range(0, n, step):
        chunk = points[i : i + step]
        d2 = np.sum((chunk[:, None, :] - points[None, :, :]) ** 2, axis=-1)
        best = max(best, float(d2.max()))
    return math.sqrt(best)


def _max_planar_diameter(coords: np.ndarray, phys: np.ndarray, fixed_axis: int) -> float:
    """Max in-plane distance among voxel centers sharing a plane index."""
    keep = [ax for ax in range(3) if ax != fixed_axis]
    best = 0.0
    for idx in np.unique(coords[:, fixed_axis]):
        pts = phys[coords[:, fixed_axis] == idx][:, keep]
        best = max(best, _max_pairwise_distance(pts))
    return best


def shape_features(m: LabelMask, label: int | None = None) -> dict[str, float]:
    """The 15 shape descriptors of one labelled region.

    Args:
        m: label map; ``label`` selects a single label, None selects any
           nonzero voxel.
    """
    mask = m.binary(label)
    if not mask.any():
        raise EmptyLabelError(f"label {label!r} selects no voxels")
    spacing = m.spacing
    n = int(np.count_nonzero(mask))
    volume = n * m.voxel_volume_mm3
    area = exposed_surface_area(mask, spacing)

    sphericity = (36.0 * math.pi * volume**2) ** (1.0 / 3.0) / area
    compactness = volume / (math.sqrt(math.pi) * area**1.5)
    radius = (3.0 * volume / (4.0 * math.pi)) ** (1.0 / 3.0)
    disproportion = area / (4.0 * math.pi * radius**2)

    coords = np.argwhere(mask)
    phys = coords.astype(np.float64) * np.asarray(spacing, dtype=np.float64)

    centered = phys - phys.mean(axis=0)
    cov = centered.T @ centered / n
    eig = np.linalg.eigvalsh(cov)  # ascending
    eig = np.clip(eig, 0.0, None)
    least, minor, major = (4.0 * math.sqrt(e) for e in eig)
    if eig[2] > 0:
        elongation = math.sqrt(eig[1] / eig[2])
        flatness = math.sqrt(eig[0] / eig[2])
    else:
        elongation = 1.0
        flatness = 1.0

    return {
        "voxel_volume": volume,
        "surface_area": area,
        "surface_volume_ratio": area / volume,
        "sphericity": sphericity,
        "compactness": compactness,
        "spherical_disproportion": disproportion,
        "maximum_3d_diameter": _max_pairwise_distance(phys),
        "maximum_2d_diameter_axial": _max_planar_diameter(coords, phys, 2),
        "maximum_2d_diameter_coronal": _max_planar_diameter(coords, phys, 1),
        "maximum_2d_diameter_sagittal": _max_planar_diameter(coords, phys, 0),
        "major_axis_length": major,
        "minor_axis_length": minor,
        "least_axis_length": least,
        "elongation": elongation,
        "flatness": flatness,
    }
