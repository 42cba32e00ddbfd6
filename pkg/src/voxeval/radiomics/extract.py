"""The extraction pipeline: filters, families, manifest, and table output.

``extract_all`` computes shape descriptors once from the mask, then runs the
five intensity families on the original image, each LoG response, and each
wavelet sub-band.  Wavelet sub-bands live on the half-resolution grid; the
ROI follows them by any-pooling (a 2x2x2 block belongs to the ROI when any
of its eight voxels does), which keeps even single-voxel regions alive.
Every value the pipeline emits equals the corresponding standalone family
call on the same (image, mask) pair.
"""

from __future__ import annotations

import csv
import json
from typing import Iterable, Sequence

import numpy as np

from ..errors import EmptyLabelError, GridMismatchError, ValidationError
from ..volume import LabelMask, Volume, wavelet3d
from .config import ExtractionConfig, FeatureVector, Manifest, build_manifest
from .filters import log_filter
from .firstorder import first_order
from .shape import shape_features
from .texture import (
    glcm_features,
    gldm_features,
    glrlm_features,
    level_grid,
    ngtdm_features,
)

_SPACING_SLACK = 1e-6  # relative disagreement correct_mask will absorb


def _halve_mask(mask: np.ndarray) -> np.ndarray:
    """Any-pooled 2x downsampling of a boolean grid (dims must be even)."""
    nx, ny, nz = mask.shape
    return mask.reshape(nx // 2, 2, ny // 2, 2, nz // 2, 2).any(axis=(1, 3, 5))


def _check_geometry(v: Volume, m: LabelMask, cfg: ExtractionConfig) -> None:
    if v.dims != m.dims:
        raise GridMismatchError(f"image dims {v.dims} != mask dims {m.dims}")
    rel = np.abs(np.asarray(v.spacing) - np.asarray(m.spacing)) / np.asarray(v.spacing)
    if np.any(rel > 0):
        if not cfg.correct_mask or np.any(rel > _SPACING_SLACK):
            raise GridMismatchError(
                f"image spacing {v.spacing} != mask spacing {m.spacing}"
            )


def _intensity_block(
    image_type: str,
    values: np.ndarray,
    mask: np.ndarray,
    voxel_volume: float,
    bin_width: float,
) -> dict[str, float]:
    roi = values[mask]
    grid = level_grid(values, mask, bin_width)
    out: dict[str, float] = {}
    for name, val in first_order(roi, voxel_volume, bin_width).items():
        out[f"{image_type}/firstorder/{name}"] = val
    for family, fn in (
        ("glcm", glcm_features),
        ("glrlm", glrlm_features),
        ("gldm", gldm_features),
        ("ngtdm", ngtdm_features),
    ):
        for name, val in fn(grid).items():
            out[f"{image_type}/{family}/{name}"] = val
    return out


def extract_all(
    v: Volume,
    m: LabelMask,
    cfg: ExtractionConfig | None = None,
    case_id: str | None = None,
) -> FeatureVector:
    """Run the full manifest against one (image, mask) case.

    Raises EmptyLabelError when the configured label is absent from the
    mask, GridMismatchError on geometry disagreement, and OddDimensionError
    if the wavelet stage is enabled on an odd-sized grid.
    """
    cfg = cfg or ExtractionConfig()
    _check_geometry(v, m, cfg)
    mask = m.binary(cfg.label)
    if not mask.any():
        raise EmptyLabelError(f"mask has no voxels with label {cfg.label}")

    manifest = build_manifest(cfg)
    values: dict[str, float] = {}
    for name, val in shape_features(m, cfg.label).items():
        values[f"shape/{name}"] = val

    values.update(
        _intensity_block("original", v.values, mask, v.voxel_volume_mm3, cfg.bin_width)
    )
    for sigma in cfg.log_sigmas_mm:
        filtered = log_filter(v, sigma)
        values.update(
            _intensity_block(
                f"log-sigma-{sigma:g}mm",
                filtered.values,
                mask,
                v.voxel_volume_mm3,
                cfg.bin_width,
            )
        )
    if cfg.enable_wavelet:
        bands = wavelet3d(v)
        half_mask = _halve_mask(mask)
        for band, bv in bands.items():
            values.update(
                _intensity_block(
                    f"wavelet-{band}",
                    bv.values.astype(np.float64, copy=False),
                    half_mask,
                    bv.voxel_volume_mm3,
                    cfg.bin_width,
                )
            )

    ordered = {key: values[key] for key in manifest.keys()}
    if len(ordered) != len(values):  # pragma: no cover - internal consistency
        raise ValidationError("extraction emitted keys outside the manifest")
    bad = [k for k, x in ordered.items() if not np.isfinite(x)]
    if bad:  # pragma: no cover - conventions above keep values finite
        raise ValidationError(f"non-finite feature values: {bad[:5]}")
    return FeatureVector(values=ordered, manifest_id=manifest.manifest_id, case_id=case_id)


# ---------------------------------------------------------------------------
# table output
# ---------------------------------------------------------------------------

def features_to_csv(rows: Sequence[FeatureVector], path: str) -> None:
    """One case per row, ``case_id`` first, manifest order for columns."""
    if not rows:
        raise ValidationError("no feature vectors to write")
    keys = list(rows[0].values.keys())
    for r in rows[1:]:
        if list(r.values.keys()) != keys:
            raise ValidationError("feature vectors disagree on manifest keys")
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["case_id"] + keys)
        for i, r in enumerate(rows):
            w.writerow([r.case_id or f"case-{i}"] + [repr(x) for x in r.values.values()])


def features_to_json(rows: Sequence[FeatureVector], path: str) -> None:
    obj = {
        "manifest_id": rows[0].manifest_id if rows else None,
        "cases": {
            (r.case_id or f"case-{i}"): r.values for i, r in enumerate(rows)
        },
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, sort_keys=False)
        f.write("\n")


def write_manifest(manifest: Manifest, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest.to_json_obj(), f, indent=2)
        f.write("\n")


def read_feature_csv(path: str) -> tuple[list[str], list[str], np.ndarray]:
    """Read a feature table: (case_ids, feature_keys, values matrix)."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header or header[0] != "case_id":
            raise ValidationError(f"{path}: expected a 'case_id' first column")
        keys = header[1:]
        case_ids: list[str] = []
        data: list[list[float]] = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise ValidationError(f"{path}: ragged row for case {row[0]!r}")
            case_ids.append(row[0])
            data.append([float(x) for x in row[1:]])
    return case_ids, keys, np.asarray(data, dtype=np.float64)
