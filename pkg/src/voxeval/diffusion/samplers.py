"""Samplers: second-order multistep (plain and SDE) and the ancestral chain.

The denoiser contract is VE-space: given ``x = x0 + sigma * eps`` and the
noise level sigma, return the estimate of x0.  The multistep samplers work
on a decreasing sigma ladder in log-sigma time t = -log(sigma); each update
combines the current and previous x0 estimates (half-step extrapolation),
falling back to first order on the first step and on the final step to 0.
The ancestral sampler walks a discrete VP schedule with the posterior mean
built from the same x0 estimate, wrapping the denoiser by rescaling
``x_t / sqrt(alpha_bar_t)`` to VE space.

Everything is seeded and deterministic; samplers never mutate their inputs.
Denoiser implementations declare via ``concurrent_safe`` whether one
instance may be evaluated from several threads at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from ..errors import ValidationError
from .schedule import NoiseSchedule, karras_from_schedule, sigmas_from_schedule

SAMPLER_NAMES = (
    "linear",
    "dpmpp-2m",
    "dpmpp-2m-karras",
    "dpmpp-2m-sde",
    "dpmpp-2m-sde-karras",
)


@runtime_checkable
class Denoiser(Protocol):
    """Maps (noisy sample, noise level, condition) to an x0 estimate."""

    concurrent_safe: bool

    def denoise(self, x: np.ndarray, sigma: float, cond=None) -> np.ndarray: ...


class PointMassDenoiser:
    """Always predicts one fixed x0; the ideal denoiser for a point mass."""

    concurrent_safe = True

    def __init__(self, x0: np.ndarray) -> None:
        self.x0 = np.asarray(x0, dtype=np.float64)

    def denoise(self, x: np.ndarray, sigma: float, cond=None) -> np.ndarray:
        return np.broadcast_to(self.x0, x.shape).copy()


class GaussianPosteriorDenoiser:
    """Exact posterior mean when the data distribution is N(mu, std^2).

    E[x0 | x] = mu + std^2 / (std^2 + sigma^2) * (x - mu) in VE space.
    """

    concurrent_safe = True

    def __init__(self, mu: float, std: float) -> None:
        if std < 0:
            raise ValidationError(f"std must be >= 0, got {std}")
        self.mu = float(mu)
        self.std = float(std)

    def denoise(self, x: np.ndarray, sigma: float, cond=None) -> np.ndarray:
        shrink = self.std**2 / (self.std**2 + float(sigma) ** 2)
        return self.mu + shrink * (x - self.mu)


@dataclass(frozen=True)
class DpmState:
    """One step of the multistep solver: position, ladder index, memory."""

    x: np.ndarray
    index: int
    sigmas: np.ndarray
    prev_x0: np.ndarray | None = None
    prev_h: float | None = None

    @property
    def done(self) -> bool:
        return self.index >= self.sigmas.size - 1


def _validate_sigma_ladder(sigmas: np.ndarray) -> np.ndarray:
    s = np.asarray(sigmas, dtype=np.float64)
    if s.ndim != 1 or s.size < 2:
        raise ValidationError("sigma ladder must be 1-D with >= 2 entries")
    if s[-1] != 0.0:
        raise ValidationError("sigma ladder must end at exactly 0")
    body = s[:-1]
    if np.any(body <= 0) or np.any(np.diff(body) >= 0):
        raise ValidationError("sigmas must be strictly decreasing and positive")
    return s


def dpmpp_2m_step(
    state: DpmState,
    denoiser: Denoiser,
    cond=None,
    sde: bool = False,
    eta: float = 1.0,
    rng: np.random.Generator | None = None,
) -> DpmState:
    """Advance the solver one step along its sigma ladder.

    Plain variant: x <- (s_next/s) x + (1 - e^{-h}) D2 with h the log-sigma
    step and D2 the half-step extrapolation of the last two x0 estimates.
    SDE variant: the decay picks up an extra e^{-eta h} and fresh noise of
    matching variance enters, so eta = 0 recovers the deterministic update.
    The final step to sigma = 0 returns the x0 estimate itself.
    """
    if state.done:
        return state
    sig = state.sigmas
    i = state.index
    s_cur, s_next = float(sig[i]), float(sig[i + 1])
    x0_hat = denoiser.denoise(state.x, s_cur, cond)

    if s_next == 0.0:
        return replace(
            state, x=x0_hat, index=i + 1, prev_x0=x0_hat, prev_h=state.prev_h
        )

    t_cur, t_next = -math.log(s_cur), -math.log(s_next)
    h = t_next - t_cur

    if not sde:
        if state.prev_x0 is None:
            d = x0_hat
        else:
            r = state.prev_h / h
            d = (1.0 + 1.0 / (2.0 * r)) * x0_hat - (1.0 / (2.0 * r)) * state.prev_x0
        x = (s_next / s_cur) * state.x - math.expm1(-h) * d
    else:
        eta_h = eta * h
        decay = (s_next / s_cur) * math.exp(-eta_h)
        x = decay * state.x - math.expm1(-h - eta_h) * x0_hat
        if state.prev_x0 is not None:
            r = state.prev_h / h
            x = x + (-math.expm1(-h - eta_h)) * 0.5 / r * (x0_hat - state.prev_x0)
        if eta > 0:
            if rng is None:
                raise ValidationError("SDE variant needs a random generator")
            noise_scale = s_next * math.sqrt(-math.expm1(-2.0 * eta_h))
            x = x + noise_scale * rng.standard_normal(state.x.shape)

    return DpmState(x=x, index=i + 1, sigmas=sig, prev_x0=x0_hat, prev_h=h)


def dpmpp_2m_sample(
    denoiser: Denoiser,
    sigmas: Sequence[float],
    shape: tuple[int, ...],
    seed: int,
    cond=None,
    sde: bool = False,
    eta: float = 1.0,
    init: np.ndarray | None = None,
) -> np.ndarray:
    """Run the multistep solver from pure noise down the sigma ladder."""
    sig = _validate_sigma_ladder(np.asarray(sigmas))
    rng = np.random.default_rng(seed)
    if init is None:
        x = sig[0] * rng.standard_normal(shape)
    else:
        x = np.array(init, dtype=np.float64, copy=True)
    state = DpmState(x=x, index=0, sigmas=sig)
    while not state.done:
        state = dpmpp_2m_step(state, denoiser, cond=cond, sde=sde, eta=eta, rng=rng)
    return state.x


def linear_sample(
    denoiser: Denoiser,
    schedule: NoiseSchedule,
    shape: tuple[int, ...],
    seed: int,
    steps: int | None = None,
    cond=None,
    init: np.ndarray | None = None,
    step_callback=None,
) -> np.ndarray:
    """Ancestral chain over the full schedule (or evenly respaced steps).

    Each transition uses the posterior mean written in terms of the x0
    estimate; the final transition is exact (variance zero), so a perfect
    x0 prediction is returned untouched.  ``step_callback(t, x)`` observes
    every state of the chain at its schedule step, the initial noise
    included, and may return a replacement state (known-region replacement
    during inpainting hangs off this hook).
    """
    ab = schedule.alpha_bars
    t_indices = np.arange(schedule.steps - 1, -1, -1)
    if steps is not None:
        from .schedule import respaced_indices

        t_indices = respaced_indices(schedule.steps, steps)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(shape) if init is None else np.array(init, dtype=np.float64, copy=True)
    if step_callback is not None:
        out = step_callback(int(t_indices[0]), x)
        if out is not None:
            x = out
    for k, t in enumerate(t_indices):
        ab_t = float(ab[t])
        sigma_ve = math.sqrt((1.0 - ab_t) / ab_t)
        x0_hat = denoiser.denoise(x / math.sqrt(ab_t), sigma_ve, cond)
        if k + 1 < t_indices.size:
            t_prev = int(t_indices[k + 1])
            ab_prev = float(ab[t_prev])
        else:
            t_prev = -1
            ab_prev = 1.0
        alpha_step = ab_t / ab_prev
        beta_step = 1.0 - alpha_step
        denom = 1.0 - ab_t
        mean = (
            math.sqrt(ab_prev) * beta_step / denom * x0_hat
            + math.sqrt(alpha_step) * (1.0 - ab_prev) / denom * x
        )
        if t_prev >= 0:
            var = (1.0 - ab_prev) / denom * beta_step
            x = mean + math.sqrt(var) * rng.standard_normal(shape)
            if step_callback is not None:
                out = step_callback(t_prev, x)
                if out is not None:
                    x = out
        else:
            x = mean
    return x


def sample(
    name: str,
    denoiser: Denoiser,
    schedule: NoiseSchedule,
    shape: tuple[int, ...],
    seed: int,
    steps: int | None = None,
    cond=None,
    rho: float = 7.0,
) -> np.ndarray:
    """Dispatch by sampler name; see SAMPLER_NAMES for the registry."""
    if name == "linear":
        return linear_sample(denoiser, schedule, shape, seed, steps=steps, cond=cond)
    n = steps or 100
    if name in ("dpmpp-2m", "dpmpp-2m-sde"):
        sigmas = sigmas_from_schedule(schedule, n)
    elif name in ("dpmpp-2m-karras", "dpmpp-2m-sde-karras"):
        sigmas = karras_from_schedule(schedule, n, rho)
    else:
        raise ValidationError(f"unknown sampler {name!r} (choose from {SAMPLER_NAMES})")
    sde = name.endswith("sde") or name.endswith("sde-karras")
    return dpmpp_2m_sample(denoiser, sigmas, shape, seed, cond=cond, sde=sde)
