"""First-order intensity statistics over a region of interest.

Eighteen statistics computed on the raw (non-discretized) ROI intensities,
except entropy and uniformity which use the fixed-bin-width histogram shared
with the texture families.  Conventions that matter for reproducibility:

* variance, skewness and kurtosis use population moments (divide by N);
* kurtosis is NOT excess kurtosis (a Gaussian gives about 3);
* skewness and kurtosis of a zero-variance ROI are defined as 0;
* entropy uses log base 2 with the 0 * log 0 = 0 convention, so a
  single-level ROI has entropy exactly 0 and uniformity exactly 1;
* percentiles interpolate linearly between order statistics;
* robust MAD is the mean absolute deviation, from their own mean, of the
  values lying within the [P10, P90] band (inclusive).
"""

from __future__ import annotations

import numpy as np

from ..errors import EmptyLabelError

FIRSTORDER_FEATURES = (
    "energy",
    "total_energy",
    "entropy",
    "minimum",
    "percentile_10",
    "percentile_90",
    "maximum",
    "mean",
    "median",
    "interquartile_range",
    "range",
    "mean_absolute_deviation",
    "robust_mean_absolute_deviation",
    "root_mean_squared",
    "skewness",
    "kurtosis",
    "variance",
    "uniformity",
)


def histogram_probabilities(roi: np.ndarray, bin_width: float) -> np.ndarray:
    """Discretized-level probabilities for entropy/uniformity.

    Levels follow floor((x - min) / bin_width) + 1, the same rule the texture
    families use, so both views of the histogram agree.
    """
    levels = np.floor((roi - roi.min()) / float(bin_width)).astype(np.int64) + 1
    counts = np.bincount(levels)[1:]
    return counts[counts > 0] / roi.size


def first_order(roi: np.ndarray, voxel_volume_mm3: float, bin_width: float) -> dict[str, float]:
    """First-order statistics of the 1-D ROI intensity sample.

    Args:
        roi: flat array of ROI voxel intensities (must be non-empty).
        voxel_volume_mm3: physical voxel volume, used by total_energy.
        bin_width: histogram bin width for entropy and uniformity.
    """
    roi = np.asarray(roi, dtype=np.float64).ravel()
    if roi.size == 0:
        raise EmptyLabelError("first-order statistics of an empty ROI")
    n = roi.size
    mean = float(roi.mean())
    diff = roi - mean
    m2 = float(np.mean(diff**2))
    m3 = float(np.mean(diff**3))
    m4 = float(np.mean(diff**4))
    energy = float(np.sum(roi**2))
    p10, p25, p75, p90 = (float(np.percentile(roi, q)) for q in (10, 25, 75, 90))
    band = roi[(roi >= p10) & (roi <= p90)]
    p = histogram_probabilities(roi, bin_width)
    entropy = float(-np.sum(p * np.log2(p)))
    out = {
        "energy": energy,
        "total_energy": float(voxel_volume_mm3) * energy,
        "entropy": entropy,
        "minimum": float(roi.min()),
        "percentile_10": p10,
        "percentile_90": p90,
        "maximum": float(roi.max()),
        "mean": mean,
        "median": float(np.median(roi)),
        "interquartile_range": p75 - p25,
        "range": float(roi.max() - roi.min()),
        "mean_absolute_deviation": float(np.mean(np.abs(diff))),
        "robust_mean_absolute_deviation": float(np.mean(np.abs(band - band.mean())))
        if band.size
        else 0.0,
        "root_mean_squared": float(np.sqrt(energy / n)),
        "skewness": m3 / m2**1.5 if m2 > 0 else 0.0,
        "kurtosis": m4 / m2**2 if m2 > 0 else 0.0,
        "variance": m2,
        "uniformity": float(np.sum(p**2)),
    }
    return out
