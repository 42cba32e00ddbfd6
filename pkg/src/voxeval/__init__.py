"""Volumetric evaluation engine for synthetic medical images.

Subpackages: :mod:`voxeval.volume` (grids, normalization, morphology,
wavelets), :mod:`voxeval.radiomics` (the 1,065-feature extractor),
:mod:`voxeval.fidelity` (MAE, MS-SSIM, Dice, CCC, PCA distance),
:mod:`voxeval.diffusion` (schedules, samplers, inpainting math),
:mod:`voxeval.ganmath` (closed-form training objectives), and
:mod:`voxeval.vtt` (the rating-study backend).  :mod:`voxeval.cli` wires
them into the ``voxeval`` command.
"""

from . import errors
from .volume import IntensityRange, LabelMask, Volume

__version__ = "0.1.0"

__all__ = ["IntensityRange", "LabelMask", "Volume", "errors", "__version__"]
