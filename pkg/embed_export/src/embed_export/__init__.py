"""Offline export of frozen contextual token embeddings for trimine."""

from .export import (
    AlignmentError,
    ExportConfig,
    ModelLoadError,
    export_contextual,
    load_any_dataset,
    load_frozen_model,
)

__version__ = "0.1.0"

__all__ = ["AlignmentError", "ExportConfig", "ModelLoadError",
           "export_contextual", "load_any_dataset", "load_frozen_model"]
