"""Conditioning inputs for half-resolution generation.

Three full-resolution channels (ROI-size map, contrast flag map,
segmentation map) are brought down to the working grid in one of two ways:
a single-level wavelet transform per channel, which yields 8 sub-bands
each (24 channels total), or plain nearest-neighbor decimation keeping the
3 channels.  Either way the output grid halves along every axis and the
spacing doubles.

Nearest-neighbor convention: target voxel i reads source voxel 2i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import GridMismatchError, OddDimensionError, ValidationError
from ..volume import LabelMask, Volume, require_same_grid, wavelet3d, WAVELET_BANDS

_CONDITION_MODES = ("wavelet", "downsample")


@dataclass(frozen=True)
class Condition:
    """Channel-stacked conditioning tensor at half resolution."""

    channels: np.ndarray  # (C, nx, ny, nz) float32
    spacing: tuple[float, float, float]
    mode: str

    def __post_init__(self) -> None:
        if self.channels.ndim != 4:
            raise ValidationError(
                f"channels must be 4-D (C, x, y, z), got {self.channels.ndim}-D"
            )
        if self.mode not in _CONDITION_MODES:
            raise ValidationError(
                f"mode must be one of {_CONDITION_MODES}, got {self.mode!r}"
            )
        expected = 24 if self.mode == "wavelet" else 3
        if self.channels.shape[0] != expected:
            raise ValidationError(
                f"{self.mode} mode carries {expected} channels, got {self.channels.shape[0]}"
            )


def _downsample_nearest(values: np.ndarray) -> np.ndarray:
    return values[::2, ::2, ::2]


def assemble_condition(
    roi_map: Volume, contrast_map: Volume, seg: LabelMask, mode: str = "wavelet"
) -> Condition:
    """Stack the three conditioning channels at half resolution.

    Wavelet mode emits the 8 sub-bands of each channel in band order
    (channel-major, so bands 0-7 belong to the ROI map, 8-15 to the
    contrast map, 16-23 to the segmentation).  All dims must be even.
    """
    if mode not in _CONDITION_MODES:
        raise ValidationError(f"mode must be one of {_CONDITION_MODES}, got {mode!r}")
    require_same_grid(roi_map, contrast_map)
    if roi_map.dims != seg.dims:
        raise GridMismatchError(f"seg dims {seg.dims} differ from {roi_map.dims}")
    if any(d % 2 for d in roi_map.dims):
        raise OddDimensionError(f"dims must all be even, got {roi_map.dims}")

    seg_vol = Volume(seg.labels.astype(np.float32), seg.spacing, "arbitrary")
    planes: list[np.ndarray] = []
    if mode == "wavelet":
        for chan in (roi_map, contrast_map, seg_vol):
            bands = wavelet3d(chan)
            planes.extend(bands[name].values for name in WAVELET_BANDS)
    else:
        for chan in (roi_map, contrast_map, seg_vol):
            planes.append(_downsample_nearest(chan.values))
    stacked = np.stack([p.astype(np.float32) for p in planes], axis=0)
    spacing = tuple(s * 2.0 for s in roi_map.spacing)
    return Condition(channels=stacked, spacing=spacing, mode=mode)
