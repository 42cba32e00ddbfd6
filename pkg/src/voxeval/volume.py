"""Dense volumetric grids and the operations the rest of the package builds on.

A ``Volume`` is a 3-D scalar field on a regular grid with physical spacing in
millimetres.  Values are kept in a ``(nx, ny, nz)`` array indexed ``[x, y, z]``;
serialized layouts are x-fastest (Fortran order) to match the on-disk formats.
All operations here are pure: they never mutate their inputs and are safe to
call from multiple threads.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .errors import (
    DegenerateRangeError,
    EmptyLabelError,
    GridMismatchError,
    OddDimensionError,
    TargetTooSmallError,
    ValidationError,
)

INTENSITY_KINDS = ("HU", "normalized", "arbitrary")

# Tolerance for the [-1, 1] bound check on normalized volumes.  Exact formula
# outputs land inside the interval; this only absorbs float round-off from
# downstream arithmetic such as separable blurs.
_NORMALIZED_SLACK = 1e-9

WAVELET_BANDS = ("LLL", "LLH", "LHL", "LHH", "HLL", "HLH", "HHL", "HHH")


def _as_spacing(spacing: Sequence[float]) -> tuple[float, float, float]:
    sp = tuple(float(s) for s in spacing)
    if len(sp) != 3:
        raise ValidationError(f"spacing must have 3 entries, got {len(sp)}")
    if any(not math.isfinite(s) or s <= 0 for s in sp):
        raise ValidationError(f"spacing entries must be positive, got {sp}")
    return sp


class Volume:
    """A 3-D scalar field with voxel spacing and a declared intensity kind.

    Args:
        values: array of shape (nx, ny, nz), indexed [x, y, z].  Integer
            arrays are widened to float64; float32/float64 are kept as-is.
        spacing: physical voxel size (sx, sy, sz) in millimetres.
        intensity_kind: one of "HU", "normalized", "arbitrary".  A
            "normalized" volume must lie in [-1, 1].
    """

    __slots__ = ("values", "spacing", "intensity_kind")

    def __init__(
        self,
        values: np.ndarray,
        spacing: Sequence[float],
        intensity_kind: str = "arbitrary",
    ) -> None:
        arr = np.asarray(values)
        if arr.ndim != 3:
            raise ValidationError(f"volume values must be 3-D, got shape {arr.shape}")
        if arr.size == 0:
            raise ValidationError("volume must contain at least one voxel")
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float64)
        if not np.all(np.isfinite(arr)):
            raise ValidationError("volume values must be finite")
        if intensity_kind not in INTENSITY_KINDS:
            raise ValidationError(
                f"intensity_kind must be one of {INTENSITY_KINDS}, got {intensity_kind!r}"
            )
        if intensity_kind == "normalized":
            lo, hi = float(arr.min()), float(arr.max())
            if lo < -1.0 - _NORMALIZED_SLACK or hi > 1.0 + _NORMALIZED_SLACK:
                raise ValidationError(
                    f"normalized volume must lie in [-1, 1], got [{lo:g}, {hi:g}]"
                )
        self.values = arr
        self.spacing = _as_spacing(spacing)
        self.intensity_kind = intensity_kind

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.values.shape  # type: ignore[return-value]

    @property
    def voxel_volume_mm3(self) -> float:
        sx, sy, sz = self.spacing
        return sx * sy * sz

    def flat(self) -> np.ndarray:
        """Values as a 1-D array in x-fastest order."""
        return self.values.ravel(order="F")

    @classmethod
    def from_flat(
        cls,
        flat: np.ndarray,
        dims: Sequence[int],
        spacing: Sequence[float],
        intensity_kind: str = "arbitrary",
    ) -> "Volume":
        dims = tuple(int(d) for d in dims)
        arr = np.asarray(flat).reshape(dims, order="F")
        return cls(arr, spacing, intensity_kind)

    def with_values(self, values: np.ndarray, intensity_kind: str | None = None) -> "Volume":
        return Volume(values, self.spacing, intensity_kind or self.intensity_kind)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"Volume(dims={self.dims}, spacing={self.spacing}, "
            f"kind={self.intensity_kind!r})"
        )


class LabelMask:
    """An integer label map on the same kind of grid as :class:`Volume`.

    Labels are non-negative integers; 0 is background.
    """

    __slots__ = ("labels", "spacing")

    def __init__(self, labels: np.ndarray, spacing: Sequence[float]) -> None:
        arr = np.asarray(labels)
        if arr.ndim != 3:
            raise ValidationError(f"label map must be 3-D, got shape {arr.shape}")
        if arr.size == 0:
            raise ValidationError("label map must contain at least one voxel")
        if arr.dtype == bool:
            arr = arr.astype(np.int32)
        if not np.issubdtype(arr.dtype, np.integer):
            f = np.asarray(arr, dtype=np.float64)
            if not np.all(np.isfinite(f)) or np.any(f != np.round(f)):
                raise ValidationError("label map values must be integers")
            arr = f.astype(np.int32)
        if arr.min() < 0:
            raise ValidationError("label map values must be >= 0")
        self.labels = arr
        self.spacing = _as_spacing(spacing)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.labels.shape  # type: ignore[return-value]

    @property
    def voxel_volume_mm3(self) -> float:
        sx, sy, sz = self.spacing
        return sx * sy * sz

    def binary(self, label: int | None = None) -> np.ndarray:
        """Boolean array selecting one label, or any nonzero label when None."""
        if label is None:
            return self.labels > 0
        return self.labels == int(label)

    def with_labels(self, labels: np.ndarray) -> "LabelMask":
        return LabelMask(labels, self.spacing)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"LabelMask(dims={self.dims}, spacing={self.spacing})"


class IntensityRange:
    """Closed intensity interval [lo, hi] with lo < hi."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float) -> None:
        lo, hi = float(lo), float(hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValidationError("intensity range bounds must be finite")
        if not lo < hi:
            raise ValidationError(f"intensity range needs lo < hi, got [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"IntensityRange({self.lo}, {self.hi})"


def require_same_grid(a: Volume | LabelMask, b: Volume | LabelMask) -> None:
    """Raise GridMismatchError unless both objects share dims and spacing."""
    if a.dims != b.dims:
        raise GridMismatchError(f"grid dims differ: {a.dims} vs {b.dims}")
    if not np.allclose(a.spacing, b.spacing, rtol=1e-6, atol=0.0):
        raise GridMismatchError(f"grid spacing differs: {a.spacing} vs {b.spacing}")


# ---------------------------------------------------------------------------
# intensity normalization
# ---------------------------------------------------------------------------

def clip_and_scale(v: Volume, window: IntensityRange) -> Volume:
    """Clamp to ``window`` and map it affinely onto [-1, 1].

    out = 2 * (clamp(x, lo, hi) - lo) / (hi - lo) - 1, so lo maps to -1 and
    hi maps to +1 exactly.
    """
    clamped = np.clip(v.values, window.lo, window.hi)
    out = 2.0 * (clamped - window.lo) / window.width - 1.0
    return Volume(out, v.spacing, "normalized")


def nearest_rank_quantile(sorted_values: np.ndarray, q: float) -> float:
    """Nearest-rank quantile of a sorted multiset.

    Rank ``max(1, ceil(q * n))`` (1-based) of the ascending multiset; q in
    [0, 1].  This is the convention used by :func:`quantile_normalize` and by
    its test oracle.
    """
    n = sorted_values.size
    if n == 0:
        raise ValidationError("quantile of an empty multiset")
    if not 0.0 <= q <= 1.0:
        raise ValidationError(f"quantile must be in [0, 1], got {q}")
    rank = max(1, math.ceil(q * n))
    rank = min(rank, n)
    return float(sorted_values[rank - 1])


def quantile_normalize(v: Volume, q_lo: float = 0.001, q_hi: float = 0.999) -> Volume:
    """Clip at the (q_lo, q_hi) nearest-rank quantiles, then map to [-1, 1].

    Raises DegenerateRangeError when the two clip bounds coincide (e.g. a
    constant volume), because the affine map is then undefined.
    """
    if not q_lo < q_hi:
        raise ValidationError(f"need q_lo < q_hi, got ({q_lo}, {q_hi})")
    svals = np.sort(v.values, axis=None)
    lo = nearest_rank_quantile(svals, q_lo)
    hi = nearest_rank_quantile(svals, q_hi)
    if not lo < hi:
        raise DegenerateRangeError(
            f"quantile clip bounds collapsed to a point ({lo} == {hi})"
        )
    return clip_and_scale(v, IntensityRange(lo, hi))


# ---------------------------------------------------------------------------
# grid geometry
# ---------------------------------------------------------------------------

def _centered_offsets(src: Sequence[int], dst: Sequence[int]) -> tuple[int, int, int]:
    # Floor split: the leading margin gets the smaller half on odd differences.
    return tuple((d - s) // 2 for s, d in zip(src, dst))  # type: ignore[return-value]


def pad_to_shape(obj, dims: Sequence[int], fill: float = 0.0):
    """Center ``obj`` (Volume or LabelMask) in a larger grid, filling with ``fill``.

    The margin on each axis is split with the floor on the leading side, so a
    growth of 1 puts the extra plane at the trailing end.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3:
        raise ValidationError(f"target dims must have 3 entries, got {len(dims)}")
    src = obj.dims
    if any(d < s for s, d in zip(src, dims)):
        raise TargetTooSmallError(f"target {dims} smaller than source {src}")
    off = _centered_offsets(src, dims)
    if isinstance(obj, Volume):
        out = np.full(dims, float(fill), dtype=obj.values.dtype)
        out[
            off[0] : off[0] + src[0],
            off[1] : off[1] + src[1],
            off[2] : off[2] + src[2],
        ] = obj.values
        return Volume(out, obj.spacing, obj.intensity_kind)
    if isinstance(obj, LabelMask):
        out = np.full(dims, int(fill), dtype=obj.labels.dtype)
        out[
            off[0] : off[0] + src[0],
            off[1] : off[1] + src[1],
            off[2] : off[2] + src[2],
        ] = obj.labels
        return LabelMask(out, obj.spacing)
    raise ValidationError(f"cannot pad object of type {type(obj).__name__}")


def crop_to_shape(obj, dims: Sequence[int]):
    """Centered crop, the inverse of :func:`pad_to_shape` for matching dims."""
    dims = tuple(int(d) for d in dims)
    src = obj.dims
    if any(d > s for s, d in zip(src, dims)):
        raise TargetTooSmallError(f"crop target {dims} larger than source {src}")
    off = _centered_offsets(dims, src)
    sl = tuple(slice(o, o + d) for o, d in zip(off, dims))
    if isinstance(obj, Volume):
        return Volume(obj.values[sl].copy(), obj.spacing, obj.intensity_kind)
    if isinstance(obj, LabelMask):
        return LabelMask(obj.labels[sl].copy(), obj.spacing)
    raise ValidationError(f"cannot crop object of type {type(obj).__name__}")


# ---------------------------------------------------------------------------
# morphology and filtering
# ---------------------------------------------------------------------------

def dilate(m: LabelMask, iterations: int = 1) -> LabelMask:
    """Binary dilation of the nonzero support with the full 3x3x3 cube.

    The exterior of the grid counts as background, so the support saturates
    at the volume boundary.  Output labels are {0, 1}.
    """
    if iterations < 0:
        raise ValidationError(f"iterations must be >= 0, got {iterations}")
    support = m.labels > 0
    if iterations == 0:
        return LabelMask(support.astype(np.int16), m.spacing)
    out = ndimage.binary_dilation(
        support,
        structure=np.ones((3, 3, 3), dtype=bool),
        iterations=iterations,
        border_value=0,
    )
    return LabelMask(out.astype(np.int16), m.spacing)


def gaussian_blur(v: Volume, sigma_voxels: float) -> Volume:
    """Isotropic Gaussian blur; sigma is in voxel units ("blur factor").

    The separable kernel samples the Gaussian at integer offsets, truncates
    at 4 sigma, and is normalized to unit sum, with reflect boundary
    handling.  A unit-sum nonnegative kernel keeps normalized volumes inside
    [-1, 1].
    """
    sigma = float(sigma_voxels)
    if sigma < 0:
        raise ValidationError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return v.with_values(v.values.copy())
    out = ndimage.gaussian_filter(v.values, sigma=sigma, mode="reflect", truncate=4.0)
    if v.intensity_kind == "normalized":
        # Guard against last-ulp drift outside the closed interval.
        out = np.clip(out, -1.0, 1.0)
    return v.with_values(out)


def gaussian_kernel_1d(sigma: float, truncate: float = 4.0) -> np.ndarray:
    """The sampled, unit-sum 1-D kernel used by :func:`gaussian_blur`."""
    radius = int(truncate * sigma + 0.5)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def blur_mask_support(iterations: int) -> int:
    """Side length of the guaranteed support cube after n dilations of a point."""
    return 2 * iterations + 1


# ---------------------------------------------------------------------------
# single-level orthonormal Haar transform
# ---------------------------------------------------------------------------

def _haar_axis_fwd(a: np.ndarray, axis: int) -> tuple[np.ndarray, np.ndarray]:
    even = np.take(a, np.arange(0, a.shape[axis], 2), axis=axis)
    odd = np.take(a, np.arange(1, a.shape[axis], 2), axis=axis)
    inv_sqrt2 = np.float64(1.0) / np.sqrt(np.float64(2.0))
    return (even + odd) * inv_sqrt2, (even - odd) * inv_sqrt2


def wavelet3d(v: Volume) -> dict[str, Volume]:
    """Single-level orthonormal 3-D Haar analysis.

    Returns the eight half-resolution sub-bands keyed "LLL" through "HHH",
    one letter per axis in (x, y, z) order, L for the smoothing pair-average
    and H for the pair-difference.  Spacing doubles.  Every dimension must
    be even (OddDimensionError otherwise).  The transform is an isometry:
    the sub-band energies sum to the input energy.
    """
    dims = v.dims
    if any(d % 2 for d in dims):
        raise OddDimensionError(f"wavelet needs even dims, got {dims}")
    work = v.values
    if work.dtype != np.float32:
        work = work.astype(np.float64, copy=False)
    parts: dict[str, np.ndarray] = {"": work}
    for axis in range(3):
        nxt: dict[str, np.ndarray] = {}
        for key, arr in parts.items():
            lo, hi = _haar_axis_fwd(arr, axis)
            nxt[key + "L"] = lo
            nxt[key + "H"] = hi
        parts = nxt
    out_spacing = tuple(s * 2.0 for s in v.spacing)
    return {
        band: Volume(parts[band].astype(v.values.dtype, copy=False), out_spacing, "arbitrary")
        for band in WAVELET_BANDS
    }


def wavelet3d_inverse(bands: dict[str, Volume]) -> Volume:
    """Exact inverse of :func:`wavelet3d` (round trip at float precision)."""
    missing = [b for b in WAVELET_BANDS if b not in bands]
    if missing:
        raise ValidationError(f"missing wavelet bands: {missing}")
    ref = bands["LLL"]
    for b in WAVELET_BANDS:
        require_same_grid(ref, bands[b])
    arrs = {b: bands[b].values.astype(np.float64, copy=False) for b in WAVELET_BANDS}
    # Undo axes in reverse order; at each stage merge pairs of sub-bands that
    # differ only in the letter for that axis.
    keys = list(WAVELET_BANDS)
    parts: dict[str, np.ndarray] = {k: arrs[k] for k in keys}
    inv_sqrt2 = np.float64(1.0) / np.sqrt(np.float64(2.0))
    for axis in (2, 1, 0):
        merged: dict[str, np.ndarray] = {}
        prefixes = sorted({k[:axis] for k in parts})
        for pre in prefixes:
            lo = parts[pre + "L"]
            hi = parts[pre + "H"]
            n = lo.shape[axis]
            shape = list(lo.shape)
            shape[axis] = 2 * n
            out = np.empty(shape, dtype=np.float64)
            idx_even = [slice(None)] * 3
            idx_odd = [slice(None)] * 3
            idx_even[axis] = slice(0, 2 * n, 2)
            idx_odd[axis] = slice(1, 2 * n, 2)
            out[tuple(idx_even)] = (lo + hi) * inv_sqrt2
            out[tuple(idx_odd)] = (lo - hi) * inv_sqrt2
            merged[pre] = out
        parts = merged
    values = parts[""]
    half_spacing = tuple(s / 2.0 for s in ref.spacing)
    dtype = bands["LLL"].values.dtype
    return Volume(values.astype(dtype, copy=False), half_spacing, "arbitrary")
