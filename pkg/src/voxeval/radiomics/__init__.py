"""Radiomic feature extraction: first-order, texture, and shape families
computed on the original image and on LoG- and wavelet-filtered variants,
driven by a manifest that pins the exact feature set.
"""

from .config import (
    DEFAULT_MANIFEST_ID,
    ExtractionConfig,
    FeatureVector,
    Manifest,
    build_manifest,
    image_type_names,
)
from .extract import (
    extract_all,
    features_to_csv,
    features_to_json,
    read_feature_csv,
    write_manifest,
)
from .filters import log_filter
from .firstorder import FIRSTORDER_FEATURES, first_order
from .shape import SHAPE_FEATURES, shape_features
from .texture import (
    GLCM_FEATURES,
    GLDM_FEATURES,
    GLRLM_FEATURES,
    NGTDM_FEATURES,
    discretize,
    glcm_features,
    gldm_features,
    glrlm_features,
    ngtdm_features,
)

__all__ = [
    "DEFAULT_MANIFEST_ID",
    "ExtractionConfig",
    "FeatureVector",
    "Manifest",
    "build_manifest",
    "image_type_names",
    "extract_all",
    "features_to_csv",
    "features_to_json",
    "read_feature_csv",
    "write_manifest",
    "log_filter",
    "FIRSTORDER_FEATURES",
    "first_order",
    "SHAPE_FEATURES",
    "shape_features",
    "GLCM_FEATURES",
    "GLDM_FEATURES",
    "GLRLM_FEATURES",
    "NGTDM_FEATURES",
    "discretize",
    "glcm_features",
    "gldm_features",
    "glrlm_features",
    "ngtdm_features",
]
