"""Hierarchical feature extraction (TF-IDF -> NMF -> chi-square) and
classification toolkit for intrusion-detection datasets."""

from .data import ColumnKind, ColumnSpec, Dataset, LabelVector, Profile, load_csv, split_xy, train_test_split
from .errors import (ConfigError, DatasetError, DomainError, IdsfxError,
                     IntegrityError, PipelineError, SchemaError, VersionError)
from .matrix import FeatureMatrix
from .nmf import NmfConfig, NmfModel, nmf_fit, nmf_transform, nndsvd_init, reconstruction_error
from .pipeline import (FittedPipeline, PipelineConfig, pipeline_fit,
                       pipeline_load, pipeline_save, pipeline_transform)
from .select import Chi2Report, apply_selection, chi2_scores, select_k_best

__version__ = "0.1.0"

__all__ = [
    "ColumnKind", "ColumnSpec", "Dataset", "LabelVector", "Profile",
    "load_csv", "split_xy", "train_test_split",
    "FeatureMatrix",
    "NmfConfig", "NmfModel", "nmf_fit", "nmf_transform", "nndsvd_init",
    "reconstruction_error",
    "FittedPipeline", "PipelineConfig", "pipeline_fit", "pipeline_load",
    "pipeline_save", "pipeline_transform",
    "Chi2Report", "apply_selection", "chi2_scores", "select_k_best",
    "IdsfxError", "DatasetError", "SchemaError", "ConfigError", "DomainError",
    "PipelineError", "IntegrityError", "VersionError",
]
