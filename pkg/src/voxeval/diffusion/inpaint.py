"""Inpainting support: forward noising, known-region replacement, soft masks.

The replacement trick keeps a reverse trajectory consistent with a known
volume: after every ancestral transition to step t, voxels outside the
generated region are overwritten with the original volume noised forward
to the same step.  Mask convention: 1 means "generate here", 0 means
"keep the original".  Fractional mask values blend the two, so a blurred
mask produces a seam-free transition band.

Forward noise is drawn from ``np.random.default_rng([seed, t])``, one
independent stream per step, which makes any step of a trajectory exactly
replayable from (seed, t) alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyLabelError, GridMismatchError, ValidationError
from ..volume import LabelMask, Volume, dilate, gaussian_blur
from .samplers import Denoiser, linear_sample
from .schedule import NoiseSchedule

_MASK_MODES = ("edge", "full")


@dataclass(frozen=True)
class BlurMask:
    """Soft inpainting mask: per-voxel replacement weight in [0, 1]."""

    values: np.ndarray
    spacing: tuple[float, float, float]
    mode: str

    def __post_init__(self) -> None:
        v = np.asarray(self.values)
        if v.ndim != 3:
            raise ValidationError(f"mask must be 3-D, got {v.ndim}-D")
        if v.size and (float(v.min()) < 0.0 or float(v.max()) > 1.0):
            raise ValidationError("mask values must lie in [0, 1]")
        if self.mode not in _MASK_MODES:
            raise ValidationError(f"mode must be one of {_MASK_MODES}, got {self.mode!r}")

    def as_volume(self) -> Volume:
        return Volume(self.values.astype(np.float32), self.spacing, "arbitrary")


def build_blur_mask(
    label: LabelMask,
    mode: str = "edge",
    dilate_iters: int = 5,
    blur_sigma: float = 25.0,
) -> BlurMask:
    """Dilate the label, blur, clamp to [0, 1].

    Edge mode then forces the weight back to exactly 1 on every original
    label voxel, so the labeled region is always fully regenerated while
    the blurred skirt blends into its surroundings.  Full mode keeps the
    blurred values untouched.
    """
    if mode not in _MASK_MODES:
        raise ValidationError(f"mode must be one of {_MASK_MODES}, got {mode!r}")
    binary = label.binary()
    if not binary.any():
        raise EmptyLabelError("label has no voxels; nothing to inpaint")
    grown = dilate(LabelMask(binary.astype(np.int16), label.spacing), dilate_iters)
    soft = gaussian_blur(
        Volume(grown.labels.astype(np.float32), label.spacing, "arbitrary"),
        blur_sigma,
    )
    values = np.clip(soft.values.astype(np.float64), 0.0, 1.0)
    if mode == "edge":
        values[binary] = 1.0
    return BlurMask(values=values, spacing=label.spacing, mode=mode)


def forward_noise(
    original: np.ndarray, t: int, schedule: NoiseSchedule, seed: int
) -> np.ndarray:
    """Noise the original to step t: sqrt(ab_t) x0 + sqrt(1 - ab_t) eps.

    The noise stream is keyed on (seed, t), so repeated calls with the
    same arguments return the identical array.
    """
    if not 0 <= t < schedule.steps:
        raise ValidationError(f"t must be in [0, {schedule.steps}), got {t}")
    ab_t = float(schedule.alpha_bars[t])
    x0 = np.asarray(original, dtype=np.float64)
    rng = np.random.default_rng([seed, t])
    eps = rng.standard_normal(x0.shape)
    return math.sqrt(ab_t) * x0 + math.sqrt(1.0 - ab_t) * eps


def repaint_replace(
    x_t: np.ndarray,
    original: np.ndarray,
    mask: BlurMask | np.ndarray,
    t: int,
    schedule: NoiseSchedule,
    seed: int,
) -> np.ndarray:
    """Blend the trajectory state with the forward-noised original.

    Returns m * x_t + (1 - m) * forward_noise(original, t); with a binary
    mask the known region is therefore bit-identical to the replayed
    forward noising at every step.
    """
    m = mask.values if isinstance(mask, BlurMask) else np.asarray(mask, dtype=np.float64)
    x = np.asarray(x_t, dtype=np.float64)
    orig = np.asarray(original, dtype=np.float64)
    if x.shape != orig.shape or x.shape != m.shape:
        raise GridMismatchError(
            f"shapes differ: x_t {x.shape}, original {orig.shape}, mask {m.shape}"
        )
    return m * x + (1.0 - m) * forward_noise(orig, t, schedule, seed)


def inpaint_sample(
    denoiser: Denoiser,
    schedule: NoiseSchedule,
    original: np.ndarray,
    mask: BlurMask | np.ndarray,
    seed: int,
    steps: int | None = None,
    cond=None,
    on_step=None,
) -> np.ndarray:
    """Ancestral chain with known-region replacement after every transition.

    ``on_step(t, x)`` observes the post-replacement state (trajectory
    logging and the exact-replay check hang off this hook).  The forward
    noise uses the same seed as the chain but independent per-step streams.
    """
    m = mask.values if isinstance(mask, BlurMask) else np.asarray(mask, dtype=np.float64)
    orig = np.asarray(original, dtype=np.float64)
    if orig.shape != m.shape:
        raise GridMismatchError(f"shapes differ: original {orig.shape}, mask {m.shape}")

    def _replace(t: int, x: np.ndarray) -> np.ndarray:
        out = repaint_replace(x, orig, m, t, schedule, seed)
        if on_step is not None:
            on_step(t, out)
        return out

    return linear_sample(
        denoiser,
        schedule,
        orig.shape,
        seed,
        steps=steps,
        cond=cond,
        step_callback=_replace,
    )


def sample_patch_window(
    dims: tuple[int, int, int],
    patch: tuple[int, int, int],
    seed: int,
    admissible=None,
    max_tries: int = 10_000,
) -> tuple[int, int, int]:
    """Pick a patch origin uniformly among admissible windows.

    ``admissible(start)`` rejects candidate origins (e.g. windows that
    collide with organs); rejection sampling from the uniform proposal
    keeps the accepted distribution uniform over the admissible set.
    """
    if any(p > d for p, d in zip(patch, dims)):
        raise ValidationError(f"patch {patch} does not fit in volume {dims}")
    rng = np.random.default_rng(seed)
    spans = [d - p + 1 for d, p in zip(dims, patch)]
    for _ in range(max_tries):
        start = tuple(int(rng.integers(0, s)) for s in spans)
        if admissible is None or admissible(start):
            return start
    raise ValidationError(f"no admissible window found in {max_tries} draws")
