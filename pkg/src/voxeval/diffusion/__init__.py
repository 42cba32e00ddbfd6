"""Deterministic schedule construction, samplers, and inpainting support."""

from .condition import Condition, assemble_condition
from .inpaint import (
    BlurMask,
    build_blur_mask,
    forward_noise,
    inpaint_sample,
    repaint_replace,
    sample_patch_window,
)
from .samplers import (
    SAMPLER_NAMES,
    Denoiser,
    DpmState,
    GaussianPosteriorDenoiser,
    PointMassDenoiser,
    dpmpp_2m_sample,
    dpmpp_2m_step,
    linear_sample,
    sample,
)
from .schedule import (
    NoiseSchedule,
    karras_from_schedule,
    karras_sigmas,
    linear_schedule,
    respaced_indices,
    sigmas_from_schedule,
    ve_sigmas,
)

__all__ = [
    "BlurMask",
    "Condition",
    "assemble_condition",
    "build_blur_mask",
    "forward_noise",
    "inpaint_sample",
    "repaint_replace",
    "sample_patch_window",
    "karras_from_schedule",
    "respaced_indices",
    "sigmas_from_schedule",
    "SAMPLER_NAMES",
    "Denoiser",
    "DpmState",
    "GaussianPosteriorDenoiser",
    "PointMassDenoiser",
    "dpmpp_2m_sample",
    "dpmpp_2m_step",
    "linear_sample",
    "sample",
    "NoiseSchedule",
    "karras_sigmas",
    "linear_schedule",
    "ve_sigmas",
]
