"""Pedestrian gesture recognition from 2D COCO-17 skeleton sequences."""

from ._core import (
    CLASSES,
    NUM_KEYPOINTS,
    Forest,
    GestureError,
    __version__,
    center_point,
    extract_features,
    feature_names,
    fit_class_gaussians,
    generate_sequence,
    normalize_frame,
    parse_sequence,
    serialize_sequence,
    silhouette_score,
    stratified_split,
    synthetic_dataset,
    torso_size,
    train_forest,
    tsne_embed,
)

__all__ = [
    "CLASSES",
    "NUM_KEYPOINTS",
    "Forest",
    "GestureError",
    "__version__",
    "center_point",
    "extract_features",
    "feature_names",
    "fit_class_gaussians",
    "generate_sequence",
    "normalize_frame",
    "parse_sequence",
    "serialize_sequence",
    "silhouette_score",
    "stratified_split",
    "synthetic_dataset",
    "torso_size",
    "train_forest",
    "tsne_embed",
]
