"""Shared fixtures: random phantoms and the oracle import path."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

# Make the sibling `oracles` package importable from any test module.
sys.path.insert(0, str(Path(__file__).parent))

from voxeval.volume import LabelMask, Volume  # noqa: E402


def random_phantom(
    rng: np.random.Generator,
    dims: tuple[int, int, int] = (8, 8, 8),
    roi_max: int = 6,
    lo: float = -80.0,
    hi: float = 160.0,
) -> tuple[Volume, LabelMask]:
    """HU-ish random volume with a random box ROI of side <= roi_max."""
    spacing = tuple(float(s) for s in rng.uniform(0.5, 2.5, size=3))
    values = rng.uniform(lo, hi, size=dims).astype(np.float64)
    side = [int(rng.integers(2, roi_max + 1)) for _ in range(3)]
    start = [int(rng.integers(0, dims[k] - side[k] + 1)) for k in range(3)]
    labels = np.zeros(dims, dtype=np.int64)
    labels[
        start[0] : start[0] + side[0],
        start[1] : start[1] + side[1],
        start[2] : start[2] + side[2],
    ] = 1
    return (
        Volume(values, spacing, "HU"),
        LabelMask(labels, spacing),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260818)
