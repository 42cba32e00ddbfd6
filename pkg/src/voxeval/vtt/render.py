"""Slice rendering for the rating UI: window/level to 8-bit PNG."""

from __future__ import annotations

import io

import numpy as np
from PIL import Image

from ..errors import OutOfRangeError, ValidationError
from ..volume import Volume

# (window, level) defaults by intensity kind; the HU pair is the usual
# soft-tissue setting, normalized spans the full [-1, 1] band.
DEFAULT_WINDOWS = {
    "HU": (400.0, 40.0),
    "normalized": (2.0, 0.0),
}


def default_window_level(volume: Volume) -> tuple[float, float]:
    if volume.intensity_kind in DEFAULT_WINDOWS:
        return DEFAULT_WINDOWS[volume.intensity_kind]
    lo = float(volume.values.min())
    hi = float(volume.values.max())
    if hi == lo:
        return 1.0, lo
    return hi - lo, 0.5 * (hi + lo)


def slice_array(volume: Volume, axis: int, index: int) -> np.ndarray:
    if not 0 <= axis <= 2:
        raise ValidationError(f"axis must be 0..2, got {axis}")
    n = volume.dims[axis]
    if not 0 <= index < n:
        raise OutOfRangeError(f"slice index {index} outside [0, {n})")
    return np.take(volume.values, index, axis=axis)


def render_slice_png(
    volume: Volume,
    axis: int,
    index: int,
    window: float | None = None,
    level: float | None = None,
) -> bytes:
    """Grayscale PNG of one axis-aligned slice under a window/level map."""
    if window is None or level is None:
        dw, dl = default_window_level(volume)
        window = dw if window is None else float(window)
        level = dl if level is None else float(level)
    if window <= 0:
        raise ValidationError(f"window must be > 0, got {window}")
    plane = slice_array(volume, axis, index).astype(np.float64)
    lo = level - window / 2.0
    scaled = np.clip((plane - lo) / window, 0.0, 1.0)
    # transpose so the remaining fastest axis runs across the image row
    img8 = np.round(scaled.T * 255.0).astype(np.uint8)
    image = Image.fromarray(img8, mode="L")
    buf = io.BytesIO()
    image.save(buf, format="PNG")
    return buf.getvalue()
