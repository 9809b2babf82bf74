"""Skeleton-based action recognition pipeline.

Feature learning with a privileged-information denoising autoencoder,
locally-warped sequence registration against per-class phantom templates,
Fourier temporal pyramid features, and one-vs-all linear SVM classification.
"""

__version__ = "0.1.0"

from .skeleton_io import (  # noqa: F401
    ActionSequence,
    DatasetMeta,
    Joint,
    ParseError,
    SkeletonFrame,
    SyntheticSpec,
    generate_synthetic,
    parse_dataset,
    parse_msr_skeleton,
    write_canonical,
)
