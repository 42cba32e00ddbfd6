"""Noise schedules and sigma ladders.

Two parameterizations appear here.  The variance-preserving (VP) discrete
schedule carries betas, alphas, and their cumulative product alpha_bar; the
ancestral sampler walks it directly.  The ODE-style samplers instead use a
decreasing sigma ladder in the variance-exploding (VE) convention
``x = x0 + sigma * noise``; ``ve_sigmas`` converts a VP schedule into that
ladder via sigma_t = sqrt((1 - alpha_bar_t) / alpha_bar_t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class NoiseSchedule:
    """Discrete VP schedule: betas increase, alpha_bar strictly decreases."""

    betas: np.ndarray
    alphas: np.ndarray
    alpha_bars: np.ndarray

    @property
    def steps(self) -> int:
        return int(self.betas.size)

    def __post_init__(self) -> None:
        b = np.asarray(self.betas, dtype=np.float64)
        if b.ndim != 1 or b.size < 1:
            raise ValidationError("betas must be a non-empty 1-D array")
        if np.any(b <= 0) or np.any(b >= 1):
            raise ValidationError("betas must lie in (0, 1)")
        object.__setattr__(self, "betas", b)
        object.__setattr__(self, "alphas", np.asarray(self.alphas, dtype=np.float64))
        object.__setattr__(self, "alpha_bars", np.asarray(self.alpha_bars, dtype=np.float64))


def linear_schedule(steps: int, beta_start: float = 1e-4, beta_end: float = 0.02) -> NoiseSchedule:
    """Betas linearly spaced from beta_start to beta_end over ``steps``."""
    if steps < 1:
        raise ValidationError(f"steps must be >= 1, got {steps}")
    if not 0 < beta_start <= beta_end < 1:
        raise ValidationError(f"need 0 < beta_start <= beta_end < 1, got ({beta_start}, {beta_end})")
    betas = np.linspace(beta_start, beta_end, steps, dtype=np.float64)
    alphas = 1.0 - betas
    alpha_bars = np.cumprod(alphas)
    return NoiseSchedule(betas=betas, alphas=alphas, alpha_bars=alpha_bars)


def ve_sigmas(schedule: NoiseSchedule) -> np.ndarray:
    """Per-timestep VE noise levels sqrt((1 - abar) / abar), increasing in t."""
    ab = schedule.alpha_bars
    return np.sqrt((1.0 - ab) / ab)


def karras_sigmas(n: int, sigma_min: float, sigma_max: float, rho: float = 7.0) -> np.ndarray:
    """Decreasing sigma ladder with rho-warped spacing, terminated by 0.

    sigma_i = (smax^(1/rho) + i/(n-1) * (smin^(1/rho) - smax^(1/rho)))^rho
    for i = 0..n-1, with the endpoints snapped to sigma_max and sigma_min
    exactly, and a final 0 appended (length n + 1).  rho = 1 collapses to
    linear spacing.
    """
    if n < 2:
        raise ValidationError(f"need at least 2 sigmas, got {n}")
    if not 0 < sigma_min < sigma_max:
        raise ValidationError(f"need 0 < sigma_min < sigma_max, got ({sigma_min}, {sigma_max})")
    if rho <= 0:
        raise ValidationError(f"rho must be > 0, got {rho}")
    i = np.arange(n, dtype=np.float64)
    inv = 1.0 / rho
    ramp = sigma_max**inv + (i / (n - 1)) * (sigma_min**inv - sigma_max**inv)
    sig = ramp**rho
    sig[0] = sigma_max
    sig[-1] = sigma_min
    return np.append(sig, 0.0)


def karras_from_schedule(schedule: NoiseSchedule, n: int, rho: float = 7.0) -> np.ndarray:
    """Karras ladder spanning the VE range of a discrete VP schedule."""
    sig = ve_sigmas(schedule)
    return karras_sigmas(n, float(sig[0]), float(sig[-1]), rho)


def respaced_indices(total_steps: int, n: int) -> np.ndarray:
    """``n`` timestep indices evenly spread over [0, total_steps - 1], descending."""
    if not 1 <= n <= total_steps:
        raise ValidationError(f"need 1 <= n <= {total_steps}, got {n}")
    idx = np.round(np.linspace(total_steps - 1, 0, n)).astype(np.int64)
    return idx


def sigmas_from_schedule(schedule: NoiseSchedule, n: int | None = None) -> np.ndarray:
    """Decreasing VE sigma ladder sampled from a VP schedule, 0-terminated.

    With ``n`` given, timesteps are respaced evenly across the schedule
    (the standard way to run a T-step schedule in fewer sampler steps).
    """
    sig = ve_sigmas(schedule)
    if n is None:
        ladder = sig[::-1]
    else:
        ladder = sig[respaced_indices(schedule.steps, n)]
    return np.append(ladder, 0.0)
