"""Similarity and distribution-fidelity statistics between volume cohorts.

Covers voxelwise error (MAE), perceptual structural similarity (3-D
multi-scale SSIM), overlap of label maps (Dice), per-feature concordance
(CCC with the standard agreement categories), and a 2-component PCA
embedding distance between feature cohorts.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import ndimage

from .errors import (
    DegenerateRangeError,
    GridMismatchError,
    InsufficientDataError,
    ValidationError,
    VolumeTooSmallError,
)
from .volume import LabelMask, Volume, require_same_grid

# ---------------------------------------------------------------------------
# voxelwise error
# ---------------------------------------------------------------------------

def mae(a: Volume, b: Volume) -> float:
    """Mean absolute voxelwise error between two volumes on one grid."""
    require_same_grid(a, b)
    if a.intensity_kind != b.intensity_kind:
        raise ValidationError(
            f"intensity kinds differ: {a.intensity_kind} vs {b.intensity_kind}"
        )
    return float(np.mean(np.abs(a.values - b.values)))


# ---------------------------------------------------------------------------
# multi-scale SSIM (3-D)
# ---------------------------------------------------------------------------

MSSSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
_K1, _K2 = 0.01, 0.03

# Dynamic range by declared intensity kind; "arbitrary" derives it from data.
_KIND_RANGE = {"normalized": 2.0, "HU": 2000.0}


def msssim_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    """Unit-sum 1-D Gaussian window used for local statistics."""
    x = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    w = np.exp(-0.5 * (x / sigma) ** 2)
    return w / w.sum()


def _local_mean(a: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Separable windowed mean, cropped to fully-covered (valid) positions."""
    r = (w.size - 1) // 2
    out = a
    for axis in range(3):
        out = ndimage.correlate1d(out, w, axis=axis, mode="constant", cval=0.0)
    return out[r:-r or None, r:-r or None, r:-r or None]


def _downsample2(a: np.ndarray) -> np.ndarray:
    nx, ny, nz = (d - d % 2 for d in a.shape)
    a = a[:nx, :ny, :nz]
    return a.reshape(nx // 2, 2, ny // 2, 2, nz // 2, 2).mean(axis=(1, 3, 5))


def ms_ssim(
    a: Volume,
    b: Volume,
    scales: int = 5,
    window_size: int = 11,
    window_sigma: float = 1.5,
    weights: Sequence[float] | None = None,
    dynamic_range: float | None = None,
) -> float:
    """Multi-scale SSIM between two volumes.

    At each scale the contrast-structure term is averaged over all valid
    window positions; the coarsest scale uses the full SSIM (luminance
    included); the result is the weighted geometric mean.  Default weights
    are the 5-scale constants (0.0448, 0.2856, 0.3001, 0.2363, 0.1333);
    when fewer scales are requested, the leading weights are renormalized.
    Per-scale means are floored at zero before exponentiation, a declared
    convention shared with the reference implementation in the tests.

    The dynamic range comes from the intensity kind (normalized: 2, HU:
    2000) unless given explicitly; for "arbitrary" volumes it is the joint
    value range of the pair.

    Raises VolumeTooSmallError unless every dim >= 2**(scales-1) * window.
    """
    require_same_grid(a, b)
    if a.intensity_kind != b.intensity_kind:
        raise ValidationError(
            f"intensity kinds differ: {a.intensity_kind} vs {b.intensity_kind}"
        )
    if scales < 1:
        raise ValidationError(f"scales must be >= 1, got {scales}")
    need = (2 ** (scales - 1)) * window_size
    if min(a.dims) < need:
        raise VolumeTooSmallError(
            f"dims {a.dims} too small for {scales} scales with window "
            f"{window_size} (need every dim >= {need})"
        )
    if weights is None:
        if scales > len(MSSSIM_WEIGHTS):
            raise ValidationError(
                f"no default weights for {scales} scales (max {len(MSSSIM_WEIGHTS)})"
            )
        w = np.asarray(MSSSIM_WEIGHTS[:scales], dtype=np.float64)
        w = w / w.sum()
    else:
        w = np.asarray(list(weights), dtype=np.float64)
        if w.size != scales or np.any(w <= 0):
            raise ValidationError("weights must be positive, one per scale")
        w = w / w.sum()
    if dynamic_range is None:
        if a.intensity_kind in _KIND_RANGE:
            drange = _KIND_RANGE[a.intensity_kind]
        else:
            lo = min(float(a.values.min()), float(b.values.min()))
            hi = max(float(a.values.max()), float(b.values.max()))
            drange = hi - lo
    else:
        drange = float(dynamic_range)
    if drange <= 0:
        raise DegenerateRangeError("dynamic range collapsed to zero")

    c1 = (_K1 * drange) ** 2
    c2 = (_K2 * drange) ** 2
    win = msssim_window(window_size, window_sigma)
    x = a.values.astype(np.float64, copy=False)
    y = b.values.astype(np.float64, copy=False)

    terms: list[float] = []
    for level in range(scales):
        mx = _local_mean(x, win)
        my = _local_mean(y, win)
        mxx = _local_mean(x * x, win)
        myy = _local_mean(y * y, win)
        mxy = _local_mean(x * y, win)
        vx = mxx - mx * mx
        vy = myy - my * my
        cxy = mxy - mx * my
        cs = (2.0 * cxy + c2) / (vx + vy + c2)
        if level == scales - 1:
            lum = (2.0 * mx * my + c1) / (mx * mx + my * my + c1)
            terms.append(max(0.0, float(np.mean(lum * cs))))
        else:
            terms.append(max(0.0, float(np.mean(cs))))
            x = _downsample2(x)
            y = _downsample2(y)
    result = 1.0
    for t, wi in zip(terms, w):
        result *= t**wi
    return float(result)


# ---------------------------------------------------------------------------
# Dice similarity
# ---------------------------------------------------------------------------

@dataclass
class DscReport:
    """Per-structure Dice scores for one case plus their mean."""

    per_structure: dict[str, float]
    mode: str

    @property
    def mean(self) -> float:
        vals = list(self.per_structure.values())
        return float(np.mean(vals)) if vals else 1.0


def _dice(p: np.ndarray, g: np.ndarray) -> float:
    np_, ng = int(p.sum()), int(g.sum())
    if np_ == 0 and ng == 0:
        return 1.0  # both raters say "absent": perfect agreement
    inter = int(np.count_nonzero(p & g))
    return 2.0 * inter / (np_ + ng)


def dsc(
    pred: LabelMask,
    gt: LabelMask,
    mode: str = "semantic",
    groups: Mapping[str, Sequence[int]] | None = None,
) -> DscReport:
    """Dice similarity between two label maps.

    semantic mode merges raw labels into named structures via ``groups``
    (structure name -> list of raw labels, applied to both maps); with no
    groups each distinct nonzero label forms its own structure.  instance
    mode always scores raw labels individually.  A structure absent from
    both maps scores 1.0.
    """
    require_same_grid(pred, gt)
    if mode not in ("semantic", "instance"):
        raise ValidationError(f"mode must be semantic or instance, got {mode!r}")
    if mode == "instance" or groups is None:
        labels = np.union1d(np.unique(pred.labels), np.unique(gt.labels))
        labels = labels[labels > 0]
        groups = {str(int(l)): [int(l)] for l in labels}
    per: dict[str, float] = {}
    for name, labs in groups.items():
        labs_arr = np.asarray(list(labs))
        p = np.isin(pred.labels, labs_arr)
        g = np.isin(gt.labels, labs_arr)
        per[name] = _dice(p, g)
    return DscReport(per_structure=per, mode=mode)


def dsc_case_mean(reports: Sequence[DscReport]) -> dict[str, float]:
    """Aggregate per-structure scores as the mean over cases."""
    if not reports:
        raise InsufficientDataError("no Dice reports to aggregate")
    names = list(reports[0].per_structure.keys())
    for r in reports[1:]:
        if list(r.per_structure.keys()) != names:
            raise ValidationError("Dice reports disagree on structures")
    return {
        name: float(np.mean([r.per_structure[name] for r in reports])) for name in names
    }


# ---------------------------------------------------------------------------
# concordance correlation
# ---------------------------------------------------------------------------

CCC_CATEGORIES = (
    (0.90, "excellent"),
    (0.75, "good"),
    (0.50, "moderate"),
)


def ccc(x: Sequence[float], y: Sequence[float]) -> float:
    """Concordance correlation coefficient with population moments.

    ccc = 2 cov / (var_x + var_y + (mean_x - mean_y)^2).  Two constant equal
    samples agree perfectly (1.0); constant samples at different values, or
    one constant sample against a varying one, give 0.0.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("ccc needs two 1-D samples of equal length")
    if x.size < 1:
        raise InsufficientDataError("ccc of empty samples")
    mx, my = float(x.mean()), float(y.mean())
    vx = float(np.mean((x - mx) ** 2))
    vy = float(np.mean((y - my) ** 2))
    cov = float(np.mean((x - mx) * (y - my)))
    denom = vx + vy + (mx - my) ** 2
    if denom == 0.0:
        return 1.0  # identical constants
    return 2.0 * cov / denom


def ccc_category(value: float) -> str:
    """Agreement category: excellent >= 0.90 > good >= 0.75 > moderate >= 0.50 > poor."""
    for cut, name in CCC_CATEGORIES:
        if value >= cut:
            return name
    return "poor"


def ccc_report(
    keys: Sequence[str], real: np.ndarray, synth: np.ndarray
) -> dict[str, dict]:
    """Per-feature CCC between two paired cohorts (cases x features)."""
    real = np.asarray(real, dtype=np.float64)
    synth = np.asarray(synth, dtype=np.float64)
    if real.shape != synth.shape:
        raise ValidationError(f"cohort shapes differ: {real.shape} vs {synth.shape}")
    if real.shape[1] != len(keys):
        raise ValidationError("feature keys do not match table width")
    out: dict[str, dict] = {}
    for j, key in enumerate(keys):
        value = ccc(real[:, j], synth[:, j])
        out[key] = {"ccc": value, "category": ccc_category(value)}
    return out


def ccc_summary(report: Mapping[str, Mapping]) -> dict[str, float]:
    """Fraction of features in each agreement category."""
    n = max(1, len(report))
    counts: dict[str, int] = {"excellent": 0, "good": 0, "moderate": 0, "poor": 0}
    for entry in report.values():
        counts[entry["category"]] += 1
    return {k: v / n for k, v in counts.items()}


# ---------------------------------------------------------------------------
# PCA embedding distance
# ---------------------------------------------------------------------------

@dataclass
class PcaResult:
    """Two-component embedding of pooled feature cohorts."""

    distance: float
    points_a: np.ndarray
    points_b: np.ndarray
    dropped_features: int
    explained_variance_ratio: tuple[float, ...] = field(default_factory=tuple)


def pca_distance(cohort_a: np.ndarray, cohort_b: np.ndarray) -> PcaResult:
    """Centroid distance between two cohorts in a shared 2-PC embedding.

    Both cohorts are pooled, standardized per feature (z-score with
    population std; zero-variance features are dropped), and projected onto
    the top two principal components of the pooled matrix.  Returns the
    Euclidean distance between the cohort centroids in that plane.
    """
    a = np.asarray(cohort_a, dtype=np.float64)
    b = np.asarray(cohort_b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ValidationError("cohorts must be 2-D with matching feature count")
    if a.shape[0] < 2 or b.shape[0] < 2:
        raise InsufficientDataError("each cohort needs at least 2 cases")
    pooled = np.vstack([a, b])
    mu = pooled.mean(axis=0)
    sd = pooled.std(axis=0)  # population
    keep = sd > 0
    dropped = int(np.count_nonzero(~keep))
    if not keep.any():
        raise InsufficientDataError("all features have zero variance")
    z = (pooled[:, keep] - mu[keep]) / sd[keep]
    # columns are centered by construction; SVD gives principal axes
    _, s, vt = np.linalg.svd(z, full_matrices=False)
    k = min(2, vt.shape[0])
    comps = vt[:k]
    proj = z @ comps.T
    if k < 2:
        proj = np.hstack([proj, np.zeros((proj.shape[0], 2 - k))])
    pa = proj[: a.shape[0]]
    pb = proj[a.shape[0] :]
    dist = float(np.linalg.norm(pa.mean(axis=0) - pb.mean(axis=0)))
    var = s**2
    ratio = tuple(float(x) for x in (var / var.sum())[:k]) if var.sum() > 0 else ()
    return PcaResult(
        distance=dist,
        points_a=pa,
        points_b=pb,
        dropped_features=dropped,
        explained_variance_ratio=ratio,
    )


# ---------------------------------------------------------------------------
# report files
# ---------------------------------------------------------------------------

def write_ccc_report(report: Mapping[str, Mapping], path: str) -> None:
    if path.endswith(".csv"):
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["feature", "ccc", "category"])
            for key, entry in report.items():
                w.writerow([key, repr(entry["ccc"]), entry["category"]])
    else:
        obj = {"features": {k: dict(v) for k, v in report.items()},
               "summary": ccc_summary(report)}
        with open(path, "w", encoding="utf-8") as f:
            json.dump(obj, f, indent=2)
            f.write("\n")


def write_pca_scatter(result: PcaResult, path: str, label_a: str = "a", label_b: str = "b") -> None:
    """Scatter data for the 2-PC embedding, one row per case."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["cohort", "pc1", "pc2"])
        for row in result.points_a:
            w.writerow([label_a, repr(float(row[0])), repr(float(row[1]))])
        for row in result.points_b:
            w.writerow([label_b, repr(float(row[0])), repr(float(row[1]))])
