"""Band-inclusion similarity engine and explorer for heterogeneous datasets."""

from .dataset import (
    AttributeSchema,
    Bimodal1D,
    CurveEnsemble,
    Dataset,
    DatasetFormat,
    Kind,
    Unimodal1D,
    generate_mixed,
    generate_synthetic,
    parse_dataset,
    serialize_dataset,
)
from .errors import AnalysisError, DepthscopeError, IngestError
from .pipeline import AnalysisSession, AnalysisSnapshot, AnalyzeConfig, analyze, retune

__all__ = [
    "AttributeSchema",
    "Bimodal1D",
    "CurveEnsemble",
    "Dataset",
    "DatasetFormat",
    "Kind",
    "Unimodal1D",
    "generate_mixed",
    "generate_synthetic",
    "parse_dataset",
    "serialize_dataset",
    "AnalysisError",
    "DepthscopeError",
    "IngestError",
    "AnalysisSession",
    "AnalysisSnapshot",
    "AnalyzeConfig",
    "analyze",
    "retune",
]

__version__ = "0.1.0"
