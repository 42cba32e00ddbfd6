"""Extraction configuration and the feature manifest.

The manifest is the contract for what an extraction run emits: one entry per
feature, keyed ``<image_type>/<family>/<feature>`` for intensity families and
``shape/<feature>`` for the mask-only shape family.  The shipped default
(fixed bin width 25, label 1, LoG sigmas 1..5 mm, full single-level wavelet)
resolves to exactly 1,065 entries:

    shape                               15
    14 image types x first-order 18    252
    14 image types x GLCM 22           308
    14 image types x GLRLM 16          224
    14 image types x GLDM 14           196
    14 image types x NGTDM  5           70
    total                            1,065

where the 14 image types are the original image, five LoG responses, and the
eight wavelet sub-bands.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..errors import ValidationError
from ..volume import WAVELET_BANDS

DEFAULT_LOG_SIGMAS_MM = (1.0, 2.0, 3.0, 4.0, 5.0)
DEFAULT_MANIFEST_ID = "default-1065"

INTENSITY_FAMILIES = ("firstorder", "glcm", "glrlm", "gldm", "ngtdm")


@dataclass(frozen=True)
class ExtractionConfig:
    """Settings that shape an extraction run.

    ``correct_mask`` tolerates sub-ppm spacing disagreement between image and
    mask by adopting the image grid; with it off, any mismatch is an error.
    """

    bin_width: float = 25.0
    label: int = 1
    correct_mask: bool = True
    log_sigmas_mm: tuple[float, ...] = DEFAULT_LOG_SIGMAS_MM
    enable_wavelet: bool = True

    def __post_init__(self) -> None:
        if not self.bin_width > 0:
            raise ValidationError(f"bin_width must be > 0, got {self.bin_width}")
        if int(self.label) < 1:
            raise ValidationError(f"label must be >= 1, got {self.label}")
        object.__setattr__(self, "label", int(self.label))
        sig = tuple(float(s) for s in self.log_sigmas_mm)
        if any(s <= 0 for s in sig):
            raise ValidationError(f"log sigmas must be > 0, got {sig}")
        object.__setattr__(self, "log_sigmas_mm", sig)


def image_type_names(cfg: ExtractionConfig) -> list[str]:
    """Ordered image-type identifiers for a config."""
    names = ["original"]
    names += [f"log-sigma-{s:g}mm" for s in cfg.log_sigmas_mm]
    if cfg.enable_wavelet:
        names += [f"wavelet-{band}" for band in WAVELET_BANDS]
    return names


@dataclass(frozen=True)
class Manifest:
    """Immutable list of feature entries plus a stable identifier."""

    manifest_id: str
    entries: tuple[dict, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def keys(self) -> list[str]:
        return [e["key"] for e in self.entries]

    def family_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for e in self.entries:
            counts[e["family"]] = counts.get(e["family"], 0) + 1
        return counts

    def to_json_obj(self) -> dict:
        return {
            "manifest_id": self.manifest_id,
            "n_features": len(self.entries),
            "family_counts": self.family_counts(),
            "entries": list(self.entries),
        }


def build_manifest(cfg: ExtractionConfig | None = None) -> Manifest:
    """Enumerate every feature an extraction with ``cfg`` will emit, in order."""
    from .firstorder import FIRSTORDER_FEATURES
    from .shape import SHAPE_FEATURES
    from .texture import GLCM_FEATURES, GLDM_FEATURES, GLRLM_FEATURES, NGTDM_FEATURES

    cfg = cfg or ExtractionConfig()
    family_features: Mapping[str, Sequence[str]] = {
        "firstorder": FIRSTORDER_FEATURES,
        "glcm": GLCM_FEATURES,
        "glrlm": GLRLM_FEATURES,
        "gldm": GLDM_FEATURES,
        "ngtdm": NGTDM_FEATURES,
    }
    entries: list[dict] = []
    for name in SHAPE_FEATURES:
        entries.append(
            {"key": f"shape/{name}", "image_type": "mask", "family": "shape", "feature": name}
        )
    for image_type in image_type_names(cfg):
        for family in INTENSITY_FAMILIES:
            for name in family_features[family]:
                entries.append(
                    {
                        "key": f"{image_type}/{family}/{name}",
                        "image_type": image_type,
                        "family": family,
                        "feature": name,
                    }
                )
    if cfg == ExtractionConfig():
        manifest_id = DEFAULT_MANIFEST_ID
    else:
        digest = hashlib.sha256("\n".join(e["key"] for e in entries).encode()).hexdigest()
        manifest_id = f"custom-{len(entries)}-{digest[:8]}"
    return Manifest(manifest_id, tuple(entries))


@dataclass
class FeatureVector:
    """Ordered feature name -> value map tied to the manifest that defined it."""

    values: dict[str, float]
    manifest_id: str
    case_id: str | None = None
    provenance: dict = field(default_factory=dict)

    def __getitem__(self, key: str) -> float:
        return self.values[key]

    def __len__(self) -> int:
        return len(self.values)
