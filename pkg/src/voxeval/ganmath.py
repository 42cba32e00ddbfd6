"""Closed-form adversarial and diffusion training objectives.

Pure functions over numpy arrays: no autograd, no model state.  They exist
so that loss values logged by a training run (or produced by a hand
calculation) can be checked independently, term by term.  Batch arrays use
the leading axis as the batch dimension; critic outputs and gradient norms
are one scalar per sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ValidationError

DRIFT_WEIGHT = 1e-3


@dataclass(frozen=True)
class GanLambdas:
    """Term weights for the adversarial objectives."""

    l1: float = 1.0
    l2: float = 1000.0
    l3: float = 100.0
    l4: float = 1.0
    l5: float = 10.0

    def __post_init__(self) -> None:
        for name in ("l1", "l2", "l3", "l4", "l5"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")


# ct: CT-trained weights; mri: same but reconstruction relaxed to 100.
GAN_PRESETS = {
    "ct": GanLambdas(1.0, 1000.0, 100.0, 1.0, 10.0),
    "mri": GanLambdas(1.0, 100.0, 100.0, 1.0, 10.0),
}


class GeneratorLossResult(NamedTuple):
    total: float
    adversarial: float
    reconstruction: float
    tumor: float


class DiscriminatorLossResult(NamedTuple):
    total: float
    wasserstein: float
    gradient_penalty: float
    drift: float


def generator_loss(
    d_fake: np.ndarray,
    x: np.ndarray,
    g_out: np.ndarray,
    tumor: np.ndarray,
    lambdas: GanLambdas,
) -> GeneratorLossResult:
    """-l1 mean(critic) + l2 MAE + l3 MSE restricted to tumor voxels.

    The tumor term averages over masked voxels only and is defined as 0
    for an empty mask.
    """
    x = np.asarray(x, dtype=np.float64)
    g = np.asarray(g_out, dtype=np.float64)
    t = np.asarray(tumor) != 0
    if x.shape != g.shape or x.shape != t.shape:
        raise ValidationError(
            f"shapes differ: x {x.shape}, g_out {g.shape}, tumor {t.shape}"
        )
    adv = -lambdas.l1 * float(np.mean(np.asarray(d_fake, dtype=np.float64)))
    rec = lambdas.l2 * float(np.mean(np.abs(x - g)))
    n_tumor = int(t.sum())
    tum = 0.0
    if n_tumor:
        diff = x[t] - g[t]
        tum = lambdas.l3 * float(np.mean(diff * diff))
    return GeneratorLossResult(adv + rec + tum, adv, rec, tum)


def discriminator_loss(
    d_real: np.ndarray,
    d_fake: np.ndarray,
    grad_norms: np.ndarray,
    lambdas: GanLambdas,
) -> DiscriminatorLossResult:
    """Critic objective: Wasserstein gap, gradient penalty, drift.

    -l4 (mean(d_real) - mean(d_fake)) + l5 mean((|g|-1)^2) + 1e-3 mean(d_real^2).
    """
    dr = np.asarray(d_real, dtype=np.float64)
    df = np.asarray(d_fake, dtype=np.float64)
    gn = np.asarray(grad_norms, dtype=np.float64)
    if np.any(gn < 0):
        raise ValidationError("gradient norms must be >= 0")
    wass = -lambdas.l4 * (float(np.mean(dr)) - float(np.mean(df)))
    gp = lambdas.l5 * float(np.mean((gn - 1.0) ** 2))
    drift = DRIFT_WEIGHT * float(np.mean(dr * dr))
    return DiscriminatorLossResult(wass + gp + drift, wass, gp, drift)


def interpolate_samples(
    x: np.ndarray, g: np.ndarray, eps: np.ndarray
) -> np.ndarray:
    """Per-sample straight-line blend eps*x + (1-eps)*g for the penalty."""
    x = np.asarray(x, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    e = np.asarray(eps, dtype=np.float64)
    if x.shape != g.shape:
        raise ValidationError(f"shapes differ: x {x.shape}, g {g.shape}")
    if e.ndim != 1 or e.shape[0] != x.shape[0]:
        raise ValidationError("eps must hold one value per batch sample")
    if np.any(e < 0) or np.any(e > 1):
        raise ValidationError("eps values must lie in [0, 1]")
    e = e.reshape((-1,) + (1,) * (x.ndim - 1))
    return e * x + (1.0 - e) * g


def diffusion_losses(
    x0: np.ndarray,
    x0_hat: np.ndarray,
    mask: np.ndarray,
    l1: float = 10.0,
) -> tuple[float, float]:
    """(plain MSE, MSE plus l1-weighted masked MSE).

    The masked term averages over masked voxels; an empty mask contributes
    nothing, so both losses then coincide.
    """
    a = np.asarray(x0, dtype=np.float64)
    b = np.asarray(x0_hat, dtype=np.float64)
    m = np.asarray(mask) != 0
    if a.shape != b.shape or a.shape != m.shape:
        raise ValidationError(
            f"shapes differ: x0 {a.shape}, x0_hat {b.shape}, mask {m.shape}"
        )
    diff = a - b
    l_wdm = float(np.mean(diff * diff))
    n_mask = int(m.sum())
    l_inpaint = l_wdm
    if n_mask:
        md = diff[m]
        l_inpaint = l_wdm + l1 * float(np.mean(md * md))
    return l_wdm, l_inpaint


@dataclass(frozen=True)
class AugmentationState:
    """Adaptive augmentation probability and its fixed step size."""

    p: float = 0.0
    step: float = 0.05

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError(f"p must lie in [0, 1], got {self.p}")


def ada_update(
    state: AugmentationState, train_sign_sum: float, val_sign_sum: float
) -> AugmentationState:
    """Raise p one step iff train sum > 0 and val sum < 0, else lower it.

    The result is clamped to [0, 1]; every other input combination,
    including zeros, decreases p.
    """
    if train_sign_sum > 0 and val_sign_sum < 0:
        p = state.p + state.step
    else:
        p = state.p - state.step
    return AugmentationState(p=min(1.0, max(0.0, p)), step=state.step)
